// Command-line surface: verify / accounting / train / eval / diagnose.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pcsqcnn/dataset.hpp"
#include "pcsqcnn/diagnostics.hpp"
#include "pcsqcnn/io.hpp"
#include "pcsqcnn/train.hpp"
#include "pcsqcnn/verify.hpp"

namespace {

using namespace pcsqcnn;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct ModelConfig {
    RegisterLayout layout;
    EncoderConfig encoder;
    PipelineMode mode = PipelineMode::ReducedJunction;
    BasisKind basis = BasisKind::Fourier;
    std::uint64_t rbc_seed = 0;
};

ModelConfig model_from_document(const Document& doc, std::uint64_t seed) {
    ModelConfig mc;
    mc.layout = build_layout(static_cast<int>(doc.get_int("model.n_idx")),
                             static_cast<int>(doc.get_int("model.q")),
                             static_cast<int>(doc.get_int("model.n_f")));
    mc.encoder.a = doc.get_double_or("encoder.a", 0.0);
    mc.encoder.b = doc.get_double_or("encoder.b", std::numbers::pi);
    mc.encoder.n_f = mc.layout.n_f;
    const std::string mode = doc.get_or("model.mode", "reduced");
    if (mode == "reduced") mc.mode = PipelineMode::ReducedJunction;
    else if (mode == "explicit") mc.mode = PipelineMode::ExplicitPooling;
    else throw IoError("config: model.mode must be reduced or explicit");
    const std::string basis = doc.get_or("model.basis", "fourier");
    if (basis == "fourier") mc.basis = BasisKind::Fourier;
    else if (basis == "random") {
        mc.basis = BasisKind::Random;
        mc.mode = PipelineMode::ExplicitPooling;
    } else {
        throw IoError("config: model.basis must be fourier or random");
    }
    mc.rbc_seed = doc.get_u64_or("model.rbc_seed", rng::mix64(seed ^ 0x9bc5eedbadULL));
    return mc;
}

DatasetSpec data_from_document(const Document& doc, std::uint64_t seed) {
    DatasetSpec spec;
    const std::string source = doc.get_or("data.source", "synthetic");
    if (source == "synthetic") spec.source = DatasetSpec::Source::Synthetic;
    else if (source == "idx") spec.source = DatasetSpec::Source::Idx;
    else throw IoError("config: data.source must be synthetic or idx");
    const std::string regime = doc.get_or("data.regime", "translated");
    if (regime == "translated") spec.regime = DatasetSpec::Regime::Translated;
    else if (regime == "full") spec.regime = DatasetSpec::Regime::Full;
    else throw IoError("config: data.regime must be translated or full");
    spec.train_images = doc.get_or("data.train_images", "");
    spec.train_labels = doc.get_or("data.train_labels", "");
    spec.test_images = doc.get_or("data.test_images", "");
    spec.test_labels = doc.get_or("data.test_labels", "");
    spec.synth_train_per_class = static_cast<int>(doc.get_int_or("data.synth_train_per_class", 100));
    spec.synth_test_per_class = static_cast<int>(doc.get_int_or("data.synth_test_per_class", 50));
    spec.per_class_cap = static_cast<int>(doc.get_int_or("data.per_class", 1000));
    spec.resize = static_cast<int>(doc.get_int_or("data.resize", 16));
    spec.canvas = static_cast<int>(doc.get_int_or("data.canvas", 32));
    spec.max_offset = static_cast<int>(doc.get_int_or("data.max_offset", 8));
    spec.seed = seed;
    return spec;
}

std::optional<RegisterLayout> parse_preset(const std::string& name) {
    // q<Q>nf<NF>_canvas<N>, e.g. q3nf2_canvas32
    int q = 0, nf = 0, canvas = 0;
    if (std::sscanf(name.c_str(), "q%dnf%d_canvas%d", &q, &nf, &canvas) != 3) return std::nullopt;
    if (canvas < 2 || (canvas & (canvas - 1)) != 0) return std::nullopt;
    int n_idx = 0;
    while ((1 << n_idx) < canvas) ++n_idx;
    return build_layout(n_idx, q, nf);
}

void print_accounting(const RegisterLayout& layout) {
    const ParamAccounting acc = count_parameters(layout);
    std::printf("configuration: n_idx=%d Q=%d n_f=%d (canvas %dx%d)\n", layout.n_idx, layout.Q,
                layout.n_f, layout.pixels_per_axis(), layout.pixels_per_axis());
    std::printf("total qubits: %d\n", layout.n_tot());
    std::printf("readout shape: %dx%dx%d (D_out = %lld)\n", 1 << layout.n_l(), 1 << layout.n_l(),
                layout.feature_dim(), static_cast<long long>(acc.readout_dim));
    for (std::size_t l = 0; l < acc.per_layer.size(); ++l) {
        const int branches = (l == 0) ? 1 : 4;
        std::printf("  layer %zu: %d branch(es) x %lld modes x %d coefficients = %lld\n", l + 1,
                    branches,
                    static_cast<long long>(std::int64_t{1} << (2 * layout.active_width(static_cast<int>(l) + 1))),
                    pauli_count(layout.n_f), static_cast<long long>(acc.per_layer[l]));
    }
    std::printf("quantum parameters: %lld\n", static_cast<long long>(acc.quantum));
    std::printf("closed-form check: %lld\n", static_cast<long long>(acc.quantum_closed_form));
    std::printf("classifier parameters: %lld\n", static_cast<long long>(acc.head));
    std::printf("total trainable parameters: %lld\n",
                static_cast<long long>(acc.quantum + acc.head));
}

std::vector<int> parse_shots(const std::string& csv, bool& include_exact) {
    std::vector<int> budgets;
    include_exact = false;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "inf" || item == "exact") {
            include_exact = true;
        } else {
            budgets.push_back(std::stoi(item));
            if (budgets.back() < 1) throw IoError("shots: budgets must be >= 1");
        }
    }
    return budgets;
}

std::string model_tag(const ModelConfig& mc) {
    std::string tag = "q" + std::to_string(mc.layout.Q) + "nf" + std::to_string(mc.layout.n_f) +
                      "c" + std::to_string(mc.layout.pixels_per_axis());
    tag += mc.basis == BasisKind::Fourier ? "-pcs" : "-rbc";
    return tag;
}

int cmd_verify(std::uint64_t seed, int threads) {
    const VerifyReport report = run_verification(seed, threads);
    std::printf("%-55s %-6s %8s  %s\n", "property", "status", "time", "detail");
    for (const VerifyCheck& c : report.checks) {
        std::printf("%-55s %-6s %7.2fs  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL",
                    c.seconds, c.detail.c_str());
    }
    std::printf("verification %s\n", report.all_passed() ? "PASSED" : "FAILED");
    return report.all_passed() ? kExitOk : kExitVerifyFailed;
}

int cmd_accounting(const std::string& config) {
    if (const std::optional<RegisterLayout> preset = parse_preset(config)) {
        print_accounting(*preset);
        return kExitOk;
    }
    if (!std::filesystem::exists(config)) {
        std::fprintf(stderr,
                     "accounting: '%s' is neither a preset (q<Q>nf<F>_canvas<N>) nor a file\n",
                     config.c_str());
        return kExitUsage;
    }
    const Document doc = Document::load(config);
    print_accounting(build_layout(static_cast<int>(doc.get_int("model.n_idx")),
                                  static_cast<int>(doc.get_int("model.q")),
                                  static_cast<int>(doc.get_int("model.n_f"))));
    return kExitOk;
}

int cmd_train(const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
              int threads) {
    const Document doc = Document::load(config_path);
    const ModelConfig mc = model_from_document(doc, seed);
    const DatasetSpec spec = data_from_document(doc, seed);
    const Benchmark bench = build_benchmark(spec);

    LayerStack stack = make_stack(mc.layout, mc.mode, mc.basis, mc.rbc_seed);
    rng::Stream ps(seed, "init-quantum");
    stack.params = random_params(mc.layout, ps);
    rng::Stream hs(seed, "init-head");
    HeadParams head = init_head(static_cast<int>(mc.layout.readout_dim()), 10, hs);

    TrainConfig cfg;
    cfg.lr = doc.get_double_or("train.lr", 3e-2);
    cfg.epochs = static_cast<int>(doc.get_int_or("train.epochs", 100));
    cfg.batch = static_cast<int>(doc.get_int_or("train.batch", 256));
    cfg.eval_every = static_cast<int>(doc.get_int_or("train.eval_every", 10));
    cfg.seed = seed;
    cfg.threads = threads;

    std::filesystem::create_directories(out_dir);
    const std::string run_id = "train-" + model_tag(mc) + "-s" + std::to_string(seed);
    MetricsWriter metrics((std::filesystem::path(out_dir) / "metrics.tsv").string(), run_id);

    std::printf("training %s: %zu train / %zu test samples, %lld quantum + %lld head params\n",
                run_id.c_str(), bench.train.size(), bench.test.size(),
                static_cast<long long>(stack.params.total()),
                static_cast<long long>(head.w.size() + head.b.size()));
    const TrainResult result = train(stack, head, bench.train, bench.test, mc.encoder, cfg);
    for (const EpochStats& s : result.history) {
        metrics.row(s.epoch, "train", s.train_loss, s.train_accuracy);
        if (s.evaluated) {
            metrics.row(s.epoch, "test", s.test_loss, s.test_accuracy);
            std::printf("epoch %4d  train loss %.4f acc %.4f  test loss %.4f acc %.4f\n", s.epoch,
                        s.train_loss, s.train_accuracy, s.test_loss, s.test_accuracy);
        }
    }

    Checkpoint ck;
    ck.layout = mc.layout;
    ck.encoder = mc.encoder;
    ck.mode = mc.mode;
    ck.basis = mc.basis;
    ck.rbc_seed = mc.rbc_seed;
    ck.theta = stack.params.theta;
    ck.head = head;
    ck.seed = seed;
    const std::string ck_path =
        (std::filesystem::path(out_dir) / ("checkpoint-" + run_id + ".txt")).string();
    save_checkpoint(ck, ck_path, doc.get_or("train.binary_checkpoint", "false") == "true");
    std::printf("checkpoint written to %s\n", ck_path.c_str());
    return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint_path,
             const std::string& shots_csv, std::uint64_t seed, const std::string& out_dir,
             int threads, int dump_readouts) {
    const Document doc = Document::load(config_path);
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    const LayerStack stack = stack_from_checkpoint(ck);
    const DatasetSpec spec = data_from_document(doc, ck.seed);  // frozen per-run dataset
    const Benchmark bench = build_benchmark(spec);

    bool include_exact = false;
    const std::vector<int> budgets = parse_shots(shots_csv, include_exact);
    std::filesystem::create_directories(out_dir);
    const std::string run_id = "eval-s" + std::to_string(seed);
    MetricsWriter metrics((std::filesystem::path(out_dir) / "metrics.tsv").string(), run_id);

    if (include_exact || budgets.empty()) {
        const EvalResult ev = evaluate_exact(stack, ck.head, bench.test, ck.encoder, threads);
        metrics.row(0, "test", ev.loss, ev.accuracy, "exact");
        std::printf("shots=exact  loss %.6f  accuracy %.4f\n", ev.loss, ev.accuracy);
    }
    for (int budget : budgets) {
        const EvalResult ev =
            evaluate_shots(stack, ck.head, bench.test, ck.encoder, budget, seed, 0, threads);
        metrics.row(0, "test", ev.loss, ev.accuracy, std::to_string(budget));
        std::printf("shots=%-6d loss %.6f  accuracy %.4f\n", budget, ev.loss, ev.accuracy);
    }

    if (dump_readouts > 0) {
        const std::vector<LayerBlocks> blocks = build_blocks(stack);
        const int count = std::min<int>(dump_readouts, static_cast<int>(bench.test.size()));
        for (int i = 0; i < count; ++i) {
            const StateTensor st =
                encode_frqi(bench.test.images[static_cast<std::size_t>(i)], ck.encoder);
            const ReadoutVector p = exact_readout(
                forward_quantum_traced(stack, blocks, st, false).final_state, stack.layout);
            std::string extra;
            char buf[32];
            for (double v : p.p) {
                std::snprintf(buf, sizeof buf, "%.17g ", v);
                extra += buf;
            }
            metrics.row(i, "readout", 0.0,
                        static_cast<double>(bench.test.labels[static_cast<std::size_t>(i)]),
                        "exact", extra);
        }
        std::printf("dumped %d exact readout vectors\n", count);
    }
    return kExitOk;
}

int cmd_diagnose(const std::string& config_path, const std::string& checkpoint_path,
                 std::uint64_t seed, const std::string& out_dir, int threads) {
    const Document doc = Document::load(config_path);
    std::filesystem::create_directories(out_dir);
    const std::string diag_path = (std::filesystem::path(out_dir) / "diagnostics.tsv").string();
    std::ofstream diag(diag_path, std::ios::app);
    if (!diag) throw IoError(diag_path + ": cannot open");
    if (std::filesystem::file_size(diag_path) == 0) {
        diag << "# pcsqcnn-diagnostics schema_version=1\n";
        diag << "record\tq_or_shots\tmask_or_batch\tmean\tp25\tp75\textra\n";
    }
    char buf[128];

    // gradient-norm depth family at initialization
    if (doc.get_or("diagnose.gradients", "true") == "true") {
        DatasetSpec spec = data_from_document(doc, seed);
        Dataset raw;
        if (spec.source == DatasetSpec::Source::Synthetic) {
            raw = synthesize_digits(spec.synth_test_per_class, seed ^ 0x90f1c3d5ULL);
        } else {
            raw = load_idx(spec.test_images, spec.test_labels);
        }
        DepthDiagnosticsConfig dc;
        dc.q_min = static_cast<int>(doc.get_int_or("diagnose.q_min", 1));
        dc.q_max = static_cast<int>(doc.get_int_or("diagnose.q_max", 4));
        dc.n_f = static_cast<int>(doc.get_int_or("diagnose.n_f", 3));
        dc.subset_per_class = static_cast<int>(doc.get_int_or("diagnose.subset_per_class", 25));
        dc.inits = static_cast<int>(doc.get_int_or("diagnose.inits", 12));
        dc.seed = seed;
        dc.threads = threads;
        std::printf("gradient diagnostics: Q in [%d, %d], n_f=%d, %d samples/class, %d inits\n",
                    dc.q_min, dc.q_max, dc.n_f, dc.subset_per_class, dc.inits);
        const std::vector<DepthDiagnosticsRow> rows = depth_gradient_diagnostics(raw, dc);
        auto emit = [&](int q, const char* mask, const Percentiles& g, const Percentiles& r) {
            std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g", g.mean, g.p25, g.p75);
            diag << "grad_empirical\t" << q << "\t" << mask << "\t" << buf << "\t\n";
            std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g", r.mean, r.p25, r.p75);
            diag << "grad_per_sample\t" << q << "\t" << mask << "\t" << buf << "\t\n";
            std::printf("  Q=%d %-12s |G_D| mean %.3e [%.3e, %.3e]   R_D mean %.3e\n", q, mask,
                        g.mean, g.p25, g.p75, r.mean);
        };
        for (const DepthDiagnosticsRow& row : rows) {
            emit(row.q, "all", row.empirical_all, row.per_sample_all);
            emit(row.q, "first_layer", row.empirical_first, row.per_sample_first);
            emit(row.q, "last_layer", row.empirical_last, row.per_sample_last);
            std::ostringstream offs;
            for (const auto& [dr, dc2] : row.offsets) offs << dr << ":" << dc2 << " ";
            diag << "grad_offsets\t" << row.q << "\t-\t0\t0\t0\t" << offs.str() << "\n";
        }
    }

    // bound suite
    if (doc.get_or("diagnose.bounds", "true") == "true") {
        const RegisterLayout layout =
            build_layout(static_cast<int>(doc.get_int_or("diagnose.bound_n_idx", 2)),
                         static_cast<int>(doc.get_int_or("diagnose.bound_q", 2)),
                         static_cast<int>(doc.get_int_or("diagnose.bound_n_f", 1)));
        const int trials = static_cast<int>(doc.get_int_or("diagnose.bound_trials", 50));
        const BoundReport rep = check_sensitivity_bounds(layout, trials, seed, 10, threads);
        std::printf("bounds (n_idx=%d Q=%d n_f=%d, %d trials):\n", layout.n_idx, layout.Q,
                    layout.n_f, trials);
        std::printf("  layer energy max %.6f <= %.6f : %s\n", rep.max_layer_energy,
                    rep.layer_energy_bound, rep.layer_energy_ok ? "ok" : "VIOLATED");
        std::printf("  mean |G_Q|^2 %.6f <= %.6f : %s\n", rep.mean_grad_sq, rep.grad_sq_bound,
                    rep.grad_sq_ok ? "ok" : "VIOLATED");
        std::printf("  per-coordinate mean %.3e (accounting bound %.3e)\n",
                    rep.per_coordinate_mean, rep.per_coordinate_bound);
        std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g", rep.max_layer_energy,
                      rep.mean_grad_sq, rep.per_coordinate_mean);
        diag << "bounds\t" << layout.Q << "\t-\t" << buf << "\t"
             << (rep.layer_energy_ok && rep.grad_sq_ok ? "ok" : "violated") << "\n";
        if (!rep.layer_energy_ok || !rep.grad_sq_ok) return kExitVerifyFailed;
    }

    // checkpoint-based diagnostics: entropy sweep, loss histograms, landscape
    if (!checkpoint_path.empty()) {
        const Checkpoint ck = load_checkpoint(checkpoint_path);
        const LayerStack stack = stack_from_checkpoint(ck);
        const DatasetSpec spec = data_from_document(doc, ck.seed);
        const Benchmark bench = build_benchmark(spec);
        bool include_exact = true;
        const std::vector<int> budgets =
            parse_shots(doc.get_or("diagnose.shots", "128,256,512,1024,2048"), include_exact);

        const std::vector<EntropyRow> erows =
            entropy_sweep(stack, ck.head, bench.test, ck.encoder, budgets, seed, threads);
        for (const EntropyRow& r : erows) {
            std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g", r.entropy.mean, r.entropy.p25,
                          r.entropy.p75);
            diag << "entropy\t" << r.n_shot << "\t-\t" << buf << "\t\n";
            std::printf("entropy shots=%-6s mean %.4f bits [%.4f, %.4f]\n",
                        r.n_shot == 0 ? "exact" : std::to_string(r.n_shot).c_str(),
                        r.entropy.mean, r.entropy.p25, r.entropy.p75);
        }

        const int hist_batch = static_cast<int>(doc.get_int_or("diagnose.histogram_batch", 250));
        const int hist_passes = static_cast<int>(doc.get_int_or("diagnose.histogram_passes", 100));
        if (bench.test.size() % static_cast<std::size_t>(hist_batch) == 0) {
            const std::vector<HistogramEntry> hrows = loss_histogram(
                stack, ck.head, bench.test, ck.encoder, budgets, hist_batch, hist_passes, seed,
                threads);
            for (const HistogramEntry& e : hrows) {
                std::snprintf(buf, sizeof buf, "%.17g", e.mean_loss);
                diag << "loss_histogram\t" << e.n_shot << "\t" << e.pass << ":" << e.batch << "\t"
                     << buf << "\t0\t0\t\n";
            }
            std::printf("loss histograms: %zu entries across %zu budgets written\n", hrows.size(),
                        budgets.size() + 1);
        } else {
            std::printf("loss histograms skipped: test size %zu not divisible by batch %d\n",
                        bench.test.size(), hist_batch);
        }

        const int ls_shots = static_cast<int>(doc.get_int_or("diagnose.landscape_shots", 128));
        const int ls_steps = static_cast<int>(doc.get_int_or("diagnose.landscape_steps", 21));
        const double ls_span = doc.get_double_or("diagnose.landscape_span", 3.0);
        std::vector<double> grid;
        for (int i = 0; i < ls_steps; ++i) {
            grid.push_back(-ls_span + 2.0 * ls_span * i / (ls_steps - 1));
        }
        const LandscapeResult ls =
            landscape_probe(stack, ck.head, bench.test, ck.encoder, ls_shots, grid, threads);
        for (int ia = 0; ia < ls_steps; ++ia) {
            for (int ib = 0; ib < ls_steps; ++ib) {
                const std::size_t cell = static_cast<std::size_t>(ia) * ls_steps + ib;
                std::snprintf(buf, sizeof buf, "%.17g\t%.17g", ls.loss[cell],
                              ls.valid_fraction[cell]);
                diag << "landscape\t" << ls_shots << "\t" << ia << ":" << ib << "\t" << buf
                     << "\t0\t\n";
            }
        }
        std::printf("landscape probe: center loss %.6f, %d degenerate samples skipped\n",
                    ls.center_loss, ls.skipped_samples);
    }
    std::printf("diagnostics written to %s\n", diag_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"statevector simulator, trainer, and verification harness for "
                 "pixel-translation-equivariant quantum convolutional networks"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 0;
    std::string config;
    std::string checkpoint;
    std::string shots = "inf";
    int dump_readouts = 0;

    CLI::App* verify = app.add_subcommand("verify", "run the full property battery");
    verify->add_option("--seed", seed, "base seed for randomized checks");
    verify->add_option("--threads", threads, "worker thread cap (0 = auto)");

    CLI::App* accounting =
        app.add_subcommand("accounting", "print the trainable-parameter table for a configuration");
    accounting->add_option("--config", config,
                           "preset name (q<Q>nf<F>_canvas<N>) or config file path")
        ->required();

    CLI::App* train_cmd = app.add_subcommand("train", "train a model from a config file");
    train_cmd->add_option("--config", config, "config file path")->required();
    train_cmd->add_option("--seed", seed, "run seed (data, init, shuffle)");
    train_cmd->add_option("--out", out_dir, "output directory");
    train_cmd->add_option("--threads", threads, "worker thread cap (0 = auto)");

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
    eval_cmd->add_option("--config", config, "config file path")->required();
    eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint path")->required();
    eval_cmd->add_option("--shots", shots, "comma list of budgets and/or 'inf'");
    eval_cmd->add_option("--dump-readouts", dump_readouts,
                         "also export the first N exact readout vectors as metrics rows");
    eval_cmd->add_option("--seed", seed, "sampling seed");
    eval_cmd->add_option("--out", out_dir, "output directory");
    eval_cmd->add_option("--threads", threads, "worker thread cap (0 = auto)");

    CLI::App* diagnose = app.add_subcommand(
        "diagnose", "gradient-norm depth family, bounds, entropy, histograms, landscape");
    diagnose->add_option("--config", config, "config file path")->required();
    diagnose->add_option("--checkpoint", checkpoint,
                         "optional checkpoint for entropy/histogram/landscape probes");
    diagnose->add_option("--seed", seed, "diagnostics seed");
    diagnose->add_option("--out", out_dir, "output directory");
    diagnose->add_option("--threads", threads, "worker thread cap (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify(seed, threads);
        if (accounting->parsed()) return cmd_accounting(config);
        if (train_cmd->parsed()) return cmd_train(config, seed, out_dir, threads);
        if (eval_cmd->parsed()) {
            return cmd_eval(config, checkpoint, shots, seed, out_dir, threads, dump_readouts);
        }
        if (diagnose->parsed()) return cmd_diagnose(config, checkpoint, seed, out_dir, threads);
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const IdxError& e) {
        std::fprintf(stderr, "idx error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
