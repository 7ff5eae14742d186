// retinet — train/evaluate the LeNet-5 + precortical-module pair, sweep
// luminosity/contrast perturbations, and run the retina-math demos and
// verification suites.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "retinet/checkpoint.hpp"
#include "retinet/common.hpp"
#include "retinet/dataset.hpp"
#include "retinet/model.hpp"
#include "retinet/orientation.hpp"
#include "retinet/perturb.hpp"
#include "retinet/retina.hpp"
#include "retinet/train.hpp"
#include "retinet/verify.hpp"

namespace {

using namespace retinet;

// Timestamps stay on '#'-prefixed log lines so every other output byte is a
// pure function of (args, seed).
void log_line(const std::string& msg) {
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%d %H:%M:%S", std::localtime(&now));
    std::cout << "# [" << stamp << "] " << msg << "\n" << std::flush;
}

struct DatasetArgs {
    std::string name = "mnist";
    std::string data_dir = "data";
};

void add_dataset_flags(CLI::App* cmd, DatasetArgs& args) {
    cmd->add_option("--dataset", args.name, "mnist, fashionmnist or svhn")
        ->check(CLI::IsMember({"mnist", "fashionmnist", "svhn"}));
    cmd->add_option("--data-dir", args.data_dir, "dataset root directory");
}

ModelSpec spec_for(const std::string& model_name, const Dataset& ds,
                   int kernel_size, float dropout_p) {
    ModelSpec spec;
    spec.name = model_kind_from_name(model_name);
    spec.in_channels = ds.channels();
    spec.input_size = ds.height();
    spec.kernel_size = kernel_size;
    spec.dropout_p = dropout_p;
    spec.validate();
    return spec;
}

std::vector<float> parse_grid(const std::string& text) {
    float start, stop, step;
    if (std::sscanf(text.c_str(), "%f:%f:%f", &start, &stop, &step) != 3)
        throw ConfigError("--grid expects start:stop:step, got '" + text + "'");
    return sweep_grid(start, stop, step);
}

// ------------------------------------------------------------------ train

int cmd_train(const DatasetArgs& data, const std::string& model_name,
              int kernel_size, float dropout_p, const TrainConfig& config,
              std::string out_path) {
    const Dataset train_set = load_named_dataset(data.name, data.data_dir, Split::Train);
    const Dataset test_set = load_named_dataset(data.name, data.data_dir, Split::Test);
    log_line("loaded " + data.name + ": " + std::to_string(train_set.size()) +
             " train / " + std::to_string(test_set.size()) + " test samples");

    const ModelSpec spec = spec_for(model_name, train_set, kernel_size, dropout_p);
    Rng init_rng(config.seed);
    Model model = build_model(spec, init_rng);
    log_line(std::string(model_kind_name(spec.name)) + " built, " +
             std::to_string(model.param_count()) + " parameters");

    const TrainResult result =
        train_model(model, train_set, &test_set, config, [](const EpochLog& log) {
            char buf[120];
            std::snprintf(buf, sizeof buf, "epoch %d: train loss %.4f, test accuracy %.4f",
                          log.epoch, log.train_loss, log.test_accuracy);
            log_line(buf);
        });

    if (out_path.empty())
        out_path = std::string(model_kind_name(spec.name)) + "_" + data.name + ".rnet";
    save_checkpoint(model, out_path);
    export_train_log(result, out_path + ".log.csv");
    log_line("checkpoint written to " + out_path);
    char buf[80];
    std::snprintf(buf, sizeof buf, "final test accuracy %.6f",
                  result.log.back().test_accuracy);
    log_line(buf);
    return 0;
}

// ------------------------------------------------------------------- eval

int cmd_eval(const DatasetArgs& data, const std::string& checkpoint_path,
             float mu, float sigma) {
    Model model = load_checkpoint(checkpoint_path);
    const Dataset test_set = load_named_dataset(data.name, data.data_dir, Split::Test);
    const float acc = evaluate(model, test_set, PerturbationSpec{mu, sigma});
    std::printf("%.6f\n", acc);
    return 0;
}

// ------------------------------------------------------------------ sweep

int cmd_sweep(const DatasetArgs& data, const std::string& checkpoint_path,
              const std::string& axis_name, const std::string& grid_text,
              float fixed_mu, float fixed_sigma, bool tap_first_conv,
              std::string out_path) {
    Model model = load_checkpoint(checkpoint_path);
    const Dataset test_set = load_named_dataset(data.name, data.data_dir, Split::Test);

    const SweepAxis axis = axis_name == "mu" ? SweepAxis::Mu : SweepAxis::Sigma;
    const std::vector<float> grid =
        grid_text.empty() ? default_grid(axis) : parse_grid(grid_text);
    PerturbationSpec base;
    base.mu = fixed_mu;
    base.sigma = fixed_sigma;

    log_line("sweeping " + axis_name + " over " + std::to_string(grid.size()) +
             " points on " + data.name);
    const SweepResult result = run_sweep(model, test_set, axis, grid, base);

    if (out_path.empty())
        out_path = std::string(model_kind_name(model.spec().name)) + "_" +
                   data.name + "_" + axis_name + ".csv";
    export_csv(result, out_path);
    log_line("sweep written to " + out_path);

    if (tap_first_conv) {
        std::vector<SweepStatsRow> rows;
        for (float v : grid) {
            PerturbationSpec spec = base;
            if (axis == SweepAxis::Mu) spec.mu = v;
            else spec.sigma = v;
            const Tensor perturbed = apply_perturbation(test_set.images, spec);
            auto [before, after] =
                capture_layer_stats(model, perturbed, kFirstPrecorticalConv);
            rows.push_back({v, before, after});
        }
        const std::string stats_path = out_path + ".stats.csv";
        export_stats_csv(result, rows, stats_path);
        log_line("layer stats written to " + stats_path);
    }
    return 0;
}

// ----------------------------------------------------------------- orient

int cmd_orient(const std::string& out_dir, const std::string& input_pgm,
               float spacing) {
    std::filesystem::create_directories(out_dir);
    const ScalarField field = input_pgm.empty()
        ? ring_well_field(8.0f, 0.1f)
        : import_pgm(input_pgm, spacing);

    export_pgm(field, out_dir + "/field.pgm", 8);
    const struct { const char* name; float theta; } angles[] = {
        {"resp_1pi4", static_cast<float>(M_PI) / 4},
        {"resp_3pi4", 3 * static_cast<float>(M_PI) / 4},
        {"resp_7pi4", 7 * static_cast<float>(M_PI) / 4},
        {"resp_5pi4", 5 * static_cast<float>(M_PI) / 4},
    };
    for (const auto& a : angles) {
        const ScalarField resp = directional_response(field, a.theta);
        export_pgm(resp, out_dir + "/" + a.name + ".pgm", 8);
        const float center = resp.at(resp.width / 2, resp.height / 2);
        char buf[120];
        std::snprintf(buf, sizeof buf, "%s: response range [%.4g, %.4g], center %.4g",
                      a.name, resp.min_value(), resp.max_value(), center);
        log_line(buf);
    }

    const OrientationField of = orientation_field(field);
    export_lift_csv(orientation_lift(of), out_dir + "/orientation.csv");
    log_line("orientation lift: " + std::to_string(of.regular_count()) +
             " regular points -> " + out_dir + "/orientation.csv");
    return 0;
}

// ----------------------------------------------------------------- verify

int cmd_verify(int pairs, uint64_t seed) {
    bool all_ok = true;

    LipschitzSuiteConfig lip;
    lip.pairs_per_field = pairs;
    lip.seed = seed;
    const LipschitzSuiteResult lres = run_lipschitz_suite(lip);
    std::printf("[%s] lipschitz: %zu fields, worst empirical/bound ratio %.4f\n",
                lres.pass() ? "PASS" : "FAIL", lres.reports.size(), lres.worst_ratio);
    all_ok &= lres.pass();

    OrientationCheckConfig ocfg;
    ocfg.seed = seed;
    const OrientationCheckResult ores = run_orientation_crosscheck(ocfg);
    std::printf("[%s] orientation argmax: %lld points, max angle error %.3e rad"
                " (tolerance %.3e), %lld wide maximizer arcs\n",
                ores.pass ? "PASS" : "FAIL",
                static_cast<long long>(ores.points_checked), ores.max_angle_error,
                ores.tolerance, static_cast<long long>(ores.non_unique_maxima));
    all_ok &= ores.pass;

    const ScalarField well = ring_well_field();
    bool arcs_ok = true;
    for (float theta : {static_cast<float>(M_PI) / 4, 3 * static_cast<float>(M_PI) / 4,
                        7 * static_cast<float>(M_PI) / 4, 5 * static_cast<float>(M_PI) / 4}) {
        const ArcCheck check = check_response_arc(well, theta);
        arcs_ok &= check.pass();
        std::printf("[%s] response arc theta=%.4f: peak at (%.2f, %.2f), radius %.3f\n",
                    check.pass() ? "PASS" : "FAIL", theta, check.peak_x,
                    check.peak_y, check.peak_radius);
    }
    all_ok &= arcs_ok;

    std::printf("verify: %s\n", all_ok ? "all checks passed" : "FAILURES above");
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LeNet-5 / RetiLeNet training and light-robustness toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; CLI flags win");

    DatasetArgs data;
    std::string model_name = "lenet5";
    int kernel_size = 7;
    float dropout_p = 0.2f;
    TrainConfig config;
    std::string out_path, checkpoint_path;

    auto* train = app.add_subcommand("train", "train a model, write checkpoint + log CSV");
    add_dataset_flags(train, data);
    train->add_option("--model", model_name, "lenet5 or retilenet")
        ->check(CLI::IsMember({"lenet5", "retilenet"}));
    train->add_option("--kernel-size", kernel_size, "precortical conv size (odd)");
    train->add_option("--dropout", dropout_p, "precortical dropout probability");
    train->add_option("--epochs", config.epochs, "training epochs");
    train->add_option("--batch-size", config.batch_size, "minibatch size");
    train->add_option("--lr", config.learning_rate, "ADAM learning rate");
    train->add_option("--seed", config.seed, "RNG seed");
    train->add_option("--out", out_path, "checkpoint output path");

    auto* eval = app.add_subcommand("eval", "print accuracy of a checkpoint");
    float mu = 0.0f, sigma = 1.0f;
    add_dataset_flags(eval, data);
    eval->add_option("--checkpoint", checkpoint_path, "RNET checkpoint")->required();
    eval->add_option("--mu", mu, "luminosity offset");
    eval->add_option("--sigma", sigma, "contrast divisor");

    auto* sweep = app.add_subcommand("sweep", "accuracy sweep over mu or sigma");
    std::string axis = "mu", grid_text;
    bool tap_first_conv = false;
    add_dataset_flags(sweep, data);
    sweep->add_option("--checkpoint", checkpoint_path, "RNET checkpoint")->required();
    sweep->add_option("--axis", axis, "mu or sigma")
        ->check(CLI::IsMember({"mu", "sigma"}));
    sweep->add_option("--grid", grid_text, "start:stop:step (default per axis)");
    sweep->add_option("--mu", mu, "fixed mu while sweeping sigma");
    sweep->add_option("--sigma", sigma, "fixed sigma while sweeping mu");
    sweep->add_flag("--tap-first-conv", tap_first_conv,
                    "also write before/after stats at the first precortical conv");
    sweep->add_option("--out", out_path, "sweep CSV output path");

    auto* orient = app.add_subcommand(
        "orient", "directional-response panels and orientation lift CSV");
    std::string input_pgm;
    float pgm_spacing = 1.0f;
    orient->add_option("--out", out_path, "output directory (default orient_out)");
    orient->add_option("--input", input_pgm, "PGM image instead of the built-in field");
    orient->add_option("--spacing", pgm_spacing, "grid spacing for --input");

    auto* verify = app.add_subcommand(
        "verify", "run the Lipschitz and orientation verification suites");
    int pairs = 2000;
    uint64_t verify_seed = 2024;
    verify->add_option("--pairs", pairs, "point pairs per field");
    verify->add_option("--seed", verify_seed, "suite RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(train))
            return cmd_train(data, model_name, kernel_size, dropout_p, config, out_path);
        if (app.got_subcommand(eval))
            return cmd_eval(data, checkpoint_path, mu, sigma);
        if (app.got_subcommand(sweep))
            return cmd_sweep(data, checkpoint_path, axis, grid_text, mu, sigma,
                             tap_first_conv, out_path);
        if (app.got_subcommand(orient))
            return cmd_orient(out_path.empty() ? "orient_out" : out_path,
                              input_pgm, pgm_spacing);
        if (app.got_subcommand(verify))
            return cmd_verify(pairs, verify_seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
