// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include "haflab/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "haflab/errors.hpp"
#include "haflab/io.hpp"
#include "haflab/matfun.hpp"
#include "haflab/sampling.hpp"
#include "haflab/verify.hpp"

namespace haflab {

namespace {

namespace fs = std::filesystem;

/// Flags shared by the sampling and verification commands. Unset flags leave the config untouched.
struct RunFlags {
    std::string config;
    std::string model;
    std::string model_file;
    int cells = 0;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> replicates;
    std::optional<std::int64_t> samples;
    std::optional<int> truncation;
    std::string out;
    bool force = false;

    void attach(CLI::App* app, bool with_samples) {
        app->add_option("--config", config, "JSON experiment config");
        app->add_option("--model", model, "Builtin model name (overrides the config)");
        app->add_option("--model-file", model_file, "JSON model file (overrides the config)");
        app->add_option("--cells", cells, "Number of equal cells on the unit interval (overrides the config grid)")
            ->check(CLI::PositiveNumber);
        app->add_option("--seed", seed, "Root seed (64-bit unsigned)");
        app->add_option("--replicates", replicates, "Number of sampled patterns")->check(CLI::NonNegativeNumber);
        if (with_samples) {
            app->add_option("--samples", samples, "Monte Carlo field samples per moment")
                ->check(CLI::PositiveNumber);
            app->add_option("--truncation", truncation, "Fock truncation N")->check(CLI::NonNegativeNumber);
        }
        app->add_option("--out", out, "Output path");
        app->add_flag("--force", force, "Overwrite existing outputs");
    }

    [[nodiscard]] ExperimentConfig resolve() const {
        ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_config(config);
        if (!model.empty()) {
            c.model.kind = ModelSource::Kind::builtin;
            c.model.builtin = model;
        }
        if (!model_file.empty()) {
            c.model.kind = ModelSource::Kind::file;
            c.model.file = model_file;
        }
        if (cells > 0) c.grid = Json{{"window", {{"lo", {0.0}}, {"hi", {1.0}}}}, {"cells", {cells}}};
        if (seed) c.seed = *seed;
        if (replicates) c.replicates = *replicates;
        if (samples) c.samples = *samples;
        if (truncation) c.truncation = *truncation;
        if (!out.empty()) c.output = out;
        return c;
    }
};

std::string format_complex(Complex z) {
    std::ostringstream s;
    s << std::setprecision(17) << z.real() << ' ' << z.imag();
    return s.str();
}

/// Opens `path` for a fresh output file. Existing files are kept unless `force` is set.
std::ofstream open_new(const fs::path& path, bool force) {
    if (path.empty()) throw ConfigError("an output path is required (--out or config \"output\")");
    if (fs::exists(path) && !force) {
        throw ConfigError("refusing to overwrite " + path.string() + " (use --force)");
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + path.string());
    return f;
}

/// Report files grow by appending; `force` truncates first.
std::ofstream open_report(const fs::path& path, bool force) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | (force ? std::ios::trunc : std::ios::app));
    if (!f) throw ConfigError("cannot write " + path.string());
    return f;
}

fs::path summary_path(const fs::path& out) {
    fs::path p = out;
    p += ".summary.json";
    return p;
}

int cmd_matfun(const std::string& op, const std::string& file, const std::string& algo, double alpha,
               std::ostream& out) {
    const ComplexMatrix m = load_matrix(file);
    Complex value;
    if (op == "haf") {
        const SymmetricMatrix c(m);
        value = algo == "enum" ? hafnian_enum(c) : hafnian_dp(c);
    } else if (op == "perm") {
        value = permanent(m);
    } else if (op == "det") {
        value = determinant(m);
    } else {
        value = alpha_det(m, alpha);
    }
    out << format_complex(value) << '\n';
    return exit_ok;
}

Json box_summary(std::span<const PointPattern> patterns, const std::vector<CellSet>& boxes) {
    Json rows = Json::array();
    for (const auto& b : boxes) {
        const std::vector<CellSet> one{b};
        Json row{{"cells", b}};
        if (!patterns.empty()) {
            const MomentReport r = empirical_product_moment(patterns, one);
            row["mean"] = r.value.real();
            row["std_error"] = *r.std_error;
        } else {
            row["mean"] = nullptr;
            row["std_error"] = nullptr;
        }
        rows.push_back(row);
    }
    return rows;
}

int cmd_cox_sample(const RunFlags& flags, std::ostream& out) {
    const ExperimentConfig cfg = flags.resolve();
    const bool poisson = cfg.model.kind == ModelSource::Kind::poisson;
    std::vector<PointPattern> patterns;
    Grid grid = config_grid(cfg);
    if (poisson) {
        patterns = sample_poisson_replicates(config_profile(cfg), cfg.replicates, cfg.seed);
    } else {
        const GaussianFieldModel model = config_model(cfg);
        patterns = sample_cox_replicates(model, cfg.replicates, cfg.seed);
    }
    std::vector<CellSet> boxes = cfg.boxes.empty() ? default_boxes(grid) : cfg.boxes;
    for (const auto& b : boxes) grid.check_cells(b);
    boxes.push_back(grid.all_cells());

    const fs::path path = cfg.output;
    const fs::path summary = summary_path(path);
    {
        std::ofstream csv = open_new(path, flags.force);
        std::ofstream sum = open_new(summary, flags.force);
        write_patterns_csv_header(csv);
        write_patterns_csv(csv, patterns);
        Json s{{"command", poisson ? "cox sample (poisson)" : "cox sample"},
               {"config_sha256", cfg.hash()},
               {"seed", cfg.seed},
               {"replicates", cfg.replicates},
               {"boxes", box_summary(patterns, boxes)}};
        sum << s.dump(2) << '\n';
    }
    out << "wrote " << patterns.size() << " patterns to " << path.string() << " and " << summary.string() << '\n';
    return exit_ok;
}

int cmd_field_sample(const RunFlags& flags, std::ostream& out) {
    const ExperimentConfig cfg = flags.resolve();
    const GaussianFieldModel model = config_model(cfg);
    const FieldSampler sampler(model);
    const int m = model.cells();

    const fs::path path = cfg.output;
    const fs::path summary = summary_path(path);
    std::vector<std::vector<double>> power(m);
    {
        std::ofstream csv = open_new(path, flags.force);
        csv << "replicate,cell_index,re,im\n" << std::setprecision(17);
        for (std::int64_t r = 0; r < cfg.replicates; ++r) {
            Rng rng = stream(cfg.seed, static_cast<std::uint64_t>(r));
            const FieldSample g = sampler.draw(rng);
            for (int k = 0; k < m; ++k) {
                csv << r << ',' << k << ',' << g.values[k].real() << ',' << g.values[k].imag() << '\n';
                power[k].push_back(std::norm(g.values[k]));
            }
        }
        Json cells = Json::array();
        for (int k = 0; k < m; ++k) {
            const BatchEstimate e = batch_estimate(power[k]);
            cells.push_back({{"cell", k},
                             {"mean_abs2", cfg.replicates > 0 ? Json(e.mean) : Json(nullptr)},
                             {"std_error", cfg.replicates > 0 ? Json(e.std_error) : Json(nullptr)},
                             {"K1_diag", model.K1()(k, k).real()}});
        }
        std::ofstream sum = open_new(summary, flags.force);
        sum << Json{{"command", "field sample"},
                    {"config_sha256", cfg.hash()},
                    {"seed", cfg.seed},
                    {"replicates", cfg.replicates},
                    {"cells", cells}}
                   .dump(2)
            << '\n';
    }
    out << "wrote " << cfg.replicates << " field samples to " << path.string() << '\n';
    return exit_ok;
}

int cmd_verify(const RunFlags& flags, std::ostream& out) {
    const ExperimentConfig cfg = flags.resolve();
    const std::vector<CheckRecord> records = run_verify(cfg);
    const std::string hash = cfg.hash();

    std::ofstream file;
    if (!cfg.output.empty()) file = open_report(cfg.output, flags.force);
    int failed = 0;
    for (const auto& r : records) {
        Json j = to_json(r);
        j["config_sha256"] = hash;
        j["seed"] = cfg.seed;
        if (file.is_open()) {
            file << j.dump() << '\n';
            out << (r.passed ? "PASS " : "FAIL ") << r.check << " residual=" << r.residual
                << " tolerance=" << r.tolerance << (r.detail.empty() ? "" : " (" + r.detail + ")") << '\n';
        } else {
            out << j.dump() << '\n';
        }
        if (!r.passed) ++failed;
    }
    if (file.is_open()) out << records.size() - failed << "/" << records.size() << " checks passed\n";
    return failed == 0 ? exit_ok : exit_check_failed;
}

int cmd_bench(const std::vector<int>& sizes, int reps, std::uint64_t seed, const std::string& path, bool force,
              std::ostream& out) {
    const std::vector<BenchRow> rows = bench_hafnian(sizes, reps, seed);
    std::ostringstream csv;
    csv << "algorithm,size,repetitions,median_seconds\n";
    for (const auto& r : rows) csv << r.algorithm << ',' << r.size << ',' << r.repetitions << ',' << r.median_seconds << '\n';
    if (path.empty()) {
        out << csv.str();
    } else {
        std::ofstream f = open_new(path, force);
        f << csv.str();
    }
    return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hafnian point processes: matrix functions, samplers and Fock-space identity checks", "haflab"};
    app.require_subcommand(1);

    auto* matfun = app.add_subcommand("matfun", "Matrix functions of a matrix file");
    matfun->require_subcommand(1);
    std::string matrix_file, algo = "dp";
    double alpha = 0.0;
    std::string op;
    for (const char* name : {"haf", "perm", "det", "alphadet"}) {
        auto* sub = matfun->add_subcommand(name, std::string("Compute ") + name);
        sub->add_option("file", matrix_file, "Matrix file")->required();
        if (std::string(name) == "haf") {
            sub->add_option("--algo", algo, "enum or dp")->check(CLI::IsMember({"enum", "dp"}));
        }
        if (std::string(name) == "alphadet") sub->add_option("--alpha", alpha, "alpha")->required();
        sub->callback([&op, name] { op = name; });
    }

    RunFlags field_flags, cox_flags, verify_flags;
    auto* field = app.add_subcommand("field", "Gaussian field commands");
    field->require_subcommand(1);
    auto* field_sample = field->add_subcommand("sample", "Sample the Gaussian field on the grid");
    field_flags.attach(field_sample, false);

    auto* cox = app.add_subcommand("cox", "Cox and Poisson process commands");
    cox->require_subcommand(1);
    auto* cox_sample = cox->add_subcommand("sample", "Sample point patterns");
    cox_flags.attach(cox_sample, false);

    auto* verify = app.add_subcommand("verify", "Run the identity battery and write a JSON-lines report");
    verify_flags.attach(verify, true);

    auto* bench = app.add_subcommand("bench", "Time hafnian_enum against hafnian_dp");
    std::vector<int> sizes{8, 12};
    int reps = 3;
    std::uint64_t bench_seed = 1;
    std::string bench_out;
    bool bench_force = false;
    bench->add_option("--sizes", sizes, "Even matrix sizes")->delimiter(',');
    bench->add_option("--reps", reps, "Repetitions per size")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_seed, "Seed for the random matrices");
    bench->add_option("--out", bench_out, "CSV output path (default stdout)");
    bench->add_flag("--force", bench_force, "Overwrite an existing output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (matfun->parsed()) return cmd_matfun(op, matrix_file, algo, alpha, out);
        if (field_sample->parsed()) return cmd_field_sample(field_flags, out);
        if (cox_sample->parsed()) return cmd_cox_sample(cox_flags, out);
        if (verify->parsed()) return cmd_verify(verify_flags, out);
        if (bench->parsed()) return cmd_bench(sizes, reps, bench_seed, bench_out, bench_force, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace haflab
