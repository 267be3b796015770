// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcsnet/analysis.hpp"
#include "rcsnet/benchmark.hpp"
#include "rcsnet/detect.hpp"
#include "rcsnet/error.hpp"
#include "rcsnet/metrics.hpp"
#include "rcsnet/model.hpp"
#include "rcsnet/random.hpp"

namespace fs = std::filesystem;
using namespace rcsnet;

namespace {

enum Exit : int { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3 };

int exit_for(ErrorCode c) {
    switch (c) {
    case ErrorCode::Io:
    case ErrorCode::Input:
    case ErrorCode::BadMagic:
    case ErrorCode::VersionMismatch:
    case ErrorCode::ManifestMismatch:
    case ErrorCode::Truncated:
        return kIo;
    default:
        return kUsage;
    }
}

struct Common {
    std::string config;
    bool csv = false;
};

ModelConfig config_of(const Common& c) {
    return c.config.empty() ? ModelConfig::nano() : load_model_config(c.config);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool is_image(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

std::vector<fs::path> sorted_files(const fs::path& dir, bool (*keep)(const fs::path&)) {
    require(fs::is_directory(dir), ErrorCode::Io, "not a directory: '" + dir.string() + "'");
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && keep(e.path())) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

// ---- init -----------------------------------------------------------------

struct InitArgs {
    std::string out;
    std::uint64_t seed = 0;
    bool deployed = false;
};

int cmd_init(const Common& c, const InitArgs& a) {
    Model m = build_model(config_of(c), a.seed);
    if (a.deployed) m = reparameterize_model(m);
    save_weights(m, a.out);
    std::cout << "wrote " << to_string(m.mode()) << " weights (" << m.param_count() << " params) to " << a.out
              << "\n";
    return kOk;
}

// ---- fuse -----------------------------------------------------------------

struct FuseArgs {
    std::string in;
    std::string out;
};

int cmd_fuse(const Common& c, const FuseArgs& a) {
    const ModelConfig cfg = config_of(c);
    const Model train = load_weights(cfg, a.in);
    require(train.mode() == BlockMode::Train, ErrorCode::State, "'" + a.in + "' already holds deployed weights");
    const Model deployed = reparameterize_model(train);
    save_weights(deployed, a.out);
    const auto before = static_cast<long long>(train.param_count());
    const auto after = static_cast<long long>(deployed.param_count());
    if (c.csv) {
        std::cout << "train_params,deployed_params,delta\n" << before << "," << after << "," << after - before << "\n";
    } else {
        std::cout << "params: " << before << " -> " << after << " (delta " << after - before << ")\n"
                  << "wrote deployed weights to " << a.out << "\n";
    }
    return kOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
    std::string weights;
    int trials = 3;
    double tolerance = 1e-3;
    std::uint64_t seed = 0;
};

int cmd_verify(const Common& c, const VerifyArgs& a) {
    const ModelConfig cfg = config_of(c);
    const Model train = load_weights(cfg, a.weights);
    require(train.mode() == BlockMode::Train, ErrorCode::State,
            "verify needs train-mode weights; '" + a.weights + "' is deployed");
    const Model deployed = reparameterize_model(train);
    Rng rng(a.seed);
    const int s = cfg.input_size;
    double max_dev = 0.0;
    double sum_dev = 0.0;
    for (int t = 0; t < a.trials; ++t) {
        const Tensor x = rng.tensor(Shape{1, 3, s, s}, 0.0f, 1.0f);
        const auto ya = train.forward(x);
        const auto yb = deployed.forward(x);
        const double dev = std::max(max_abs_diff(ya.stride16, yb.stride16), max_abs_diff(ya.stride32, yb.stride32));
        max_dev = std::max(max_dev, dev);
        sum_dev += dev;
    }
    const double mean_dev = sum_dev / a.trials;
    const bool ok = max_dev <= a.tolerance;
    if (c.csv) {
        std::cout << "trials,max_deviation,mean_deviation,tolerance,pass\n"
                  << a.trials << "," << fmt("%.9g", max_dev) << "," << fmt("%.9g", mean_dev) << ","
                  << fmt("%.9g", a.tolerance) << "," << (ok ? 1 : 0) << "\n";
    } else {
        std::cout << "trials: " << a.trials << "\nmax deviation: " << fmt("%.3e", max_dev)
                  << "\nmean deviation: " << fmt("%.3e", mean_dev) << "\ntolerance: " << fmt("%.3e", a.tolerance)
                  << "\n" << (ok ? "PASS" : "FAIL") << "\n";
    }
    return ok ? kOk : kFailed;
}

// ---- flops ----------------------------------------------------------------

struct FlopsArgs {
    std::vector<std::uint64_t> paper_compare;
    std::string weights;
    bool deployed = false;
};

void print_report(const ComplexityReport& r, bool csv) {
    if (csv) {
        std::cout << "layer,kind,m,k,c1,c2,flops,mac\n";
        for (const auto& l : r.layers) {
            std::cout << l.name << "," << l.kind << ",";
            if (l.spec)
                std::cout << l.spec->m << "," << l.spec->k << "," << l.spec->c1 << "," << l.spec->c2;
            else
                std::cout << ",,,";
            std::cout << "," << l.flops << "," << l.mac << "\n";
        }
        std::cout << "total,,,,,," << r.flops << "," << r.mac << "\n";
        return;
    }
    std::printf("%-32s %-10s %5s %2s %6s %6s %14s %12s\n", "layer", "kind", "M", "K", "C1", "C2", "FLOPs", "MAC");
    for (const auto& l : r.layers) {
        if (l.spec) {
            std::printf("%-32s %-10s %5llu %2llu %6llu %6llu %14llu %12llu\n", l.name.c_str(), l.kind.c_str(),
                        static_cast<unsigned long long>(l.spec->m), static_cast<unsigned long long>(l.spec->k),
                        static_cast<unsigned long long>(l.spec->c1), static_cast<unsigned long long>(l.spec->c2),
                        static_cast<unsigned long long>(l.flops), static_cast<unsigned long long>(l.mac));
        } else {
            std::printf("%-32s %-10s %5s %2s %6s %6s %14llu %12llu\n", l.name.c_str(), l.kind.c_str(), "-", "-",
                        "-", "-", static_cast<unsigned long long>(l.flops), static_cast<unsigned long long>(l.mac));
        }
    }
    std::printf("%-32s %-10s %5s %2s %6s %6s %14llu %12llu\n", "total", "", "", "", "", "",
                static_cast<unsigned long long>(r.flops), static_cast<unsigned long long>(r.mac));
    for (const auto& n : r.notes) std::cout << "note: " << n << "\n";
}

int cmd_flops(const Common& c, const FlopsArgs& a) {
    if (!a.paper_compare.empty()) {
        require(a.paper_compare.size() == 3, ErrorCode::Config, "--paper-compare takes C M N");
        const auto r = compare_osa_elan(a.paper_compare[0], a.paper_compare[1], static_cast<int>(a.paper_compare[2]));
        print_report(r, c.csv);
        if (r.paper_constants) {
            const auto& k = *r.paper_constants;
            if (c.csv) {
                std::cout << "rcs_osa_flops,elan_flops,ratio,rcs_osa_mac,elan_mac\n"
                          << fmt("%.17g", k.rcs_osa_flops) << "," << fmt("%.17g", k.elan_flops) << ","
                          << fmt("%.17g", k.flops_ratio) << "," << fmt("%.17g", k.rcs_osa_mac) << ","
                          << fmt("%.17g", k.elan_mac) << "\n";
            } else {
                std::cout << "closed form RCS-OSA FLOPs 20.25 C^2 M^2 = " << fmt("%.17g", k.rcs_osa_flops)
                          << "\nclosed form ELAN FLOPs 40 C^2 M^2 = " << fmt("%.17g", k.elan_flops)
                          << "\nratio = " << fmt("%.10g", k.flops_ratio)
                          << "\nclosed form RCS-OSA MAC 6 C M^2 + 20.25 C^2 = " << fmt("%.17g", k.rcs_osa_mac)
                          << "\nclosed form ELAN MAC 17 C M^2 + 40 C^2 = " << fmt("%.17g", k.elan_mac) << "\n";
            }
        }
        return kOk;
    }
    const ModelConfig cfg = config_of(c);
    Model m = a.weights.empty() ? build_model(cfg, 0) : load_weights(cfg, a.weights);
    if (a.deployed && m.mode() == BlockMode::Train) m = reparameterize_model(m);
    print_report(model_complexity(m), c.csv);
    return kOk;
}

// ---- anchors --------------------------------------------------------------

struct AnchorsArgs {
    std::string labels_dir;
    int k = 4;
    int input_size = 640;
    std::uint64_t seed = 0;
    std::string distance = "iou";
};

int cmd_anchors(const Common& c, const AnchorsArgs& a) {
    std::vector<LabelBox> boxes;
    for (const auto& p : sorted_files(a.labels_dir, [](const fs::path& f) { return f.extension() == ".txt"; })) {
        const auto part = read_labels(p);
        boxes.insert(boxes.end(), part.begin(), part.end());
    }
    KMeansOptions opts;
    opts.k = a.k;
    opts.input_size = a.input_size;
    opts.seed = a.seed;
    opts.distance = a.distance == "euclidean" ? AnchorDistance::Euclidean : AnchorDistance::OneMinusIou;
    const auto r = kmeans_anchors_detailed(boxes, opts);
    if (r.degenerate)
        std::cerr << "warning: fewer distinct boxes than clusters (k = " << a.k << "); anchors are degenerate\n";
    if (c.csv) std::cout << "index,w,h\n";
    for (std::size_t i = 0; i < r.anchors.size(); ++i) {
        const auto& b = r.anchors[i];
        if (c.csv)
            std::cout << i << "," << fmt("%.4f", b.w) << "," << fmt("%.4f", b.h) << "\n";
        else
            std::cout << "anchor " << i << ": " << fmt("%.2f", b.w) << " x " << fmt("%.2f", b.h) << "\n";
    }
    if (!c.csv) {
        std::cout << "boxes: " << boxes.size() << "\niterations: " << r.iterations
                  << (r.converged ? " (converged)" : " (iteration cap)") << "\nmean distance: "
                  << fmt("%.6f", r.objective.back()) << "\n";
    }
    return kOk;
}

// ---- infer ----------------------------------------------------------------

struct DetectArgs {
    std::string weights;
    double conf = 0.25;
    double iou = 0.45;
};

Model model_from(const ModelConfig& cfg, const std::string& weights, std::uint64_t seed) {
    return weights.empty() ? build_model(cfg, seed) : load_weights(cfg, weights);
}

struct InferArgs {
    DetectArgs det;
    std::string image;
    std::uint64_t seed = 0;
};

int cmd_infer(const Common& c, const InferArgs& a) {
    const Model m = model_from(config_of(c), a.det.weights, a.seed);
    const Image img = read_pnm(a.image);
    const auto res = detect(m, img, DetectOptions{a.det.conf, a.det.iou});
    if (c.csv) std::cout << "class_id,cx,cy,w,h,confidence\n";
    for (const auto& d : res.detections) {
        if (c.csv) {
            std::cout << d.class_id << "," << fmt("%.6f", d.box.cx) << "," << fmt("%.6f", d.box.cy) << ","
                      << fmt("%.6f", d.box.w) << "," << fmt("%.6f", d.box.h) << "," << fmt("%.6f", d.confidence)
                      << "\n";
        } else {
            std::cout << format_detection(d) << "\n";
        }
    }
    return kOk;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
    DetectArgs det;
    std::string images_dir;
    std::string labels_dir;
    std::string predictions_dir;
    std::uint64_t seed = 0;
};

int cmd_eval(const Common& c, const EvalArgs& a) {
    const ModelConfig cfg = config_of(c);
    const auto images = sorted_files(a.images_dir, is_image);
    require(!images.empty(), ErrorCode::Input, "no .ppm/.pgm images in '" + a.images_dir + "'");
    std::optional<Model> model;
    if (a.predictions_dir.empty()) model.emplace(model_from(cfg, a.det.weights, a.seed));

    std::vector<ImageEval> data;
    double total_ms = 0.0;
    for (const auto& path : images) {
        const Image img = read_pnm(path);
        const fs::path label_path = fs::path(a.labels_dir) / (path.stem().string() + ".txt");
        ImageEval e;
        if (fs::exists(label_path)) e.gts = to_ground_truth(read_labels(label_path), img.width, img.height);
        if (model) {
            // Low threshold here; evaluate() applies the reporting threshold.
            auto res = detect(*model, img, DetectOptions{std::min(a.det.conf, 0.001), a.det.iou});
            total_ms += static_cast<double>(res.times.total_ns) / 1e6;
            e.preds = std::move(res.detections);
        } else {
            const fs::path pred_path = fs::path(a.predictions_dir) / (path.stem().string() + ".txt");
            std::ifstream in(pred_path);
            require(in.good(), ErrorCode::Io, "cannot open predictions '" + pred_path.string() + "'");
            e.preds = parse_detections(in);
        }
        data.push_back(std::move(e));
    }
    const EvalSummary s = evaluate(data, a.det.conf);
    const double fps = total_ms > 0.0 ? 1000.0 * static_cast<double>(images.size()) / total_ms : 0.0;
    const double gflops =
        model ? static_cast<double>(model_complexity(*model).flops) / 1e9 : 0.0;
    const std::size_t params = model ? model->param_count() : 0;
    const std::string hash = config_hash(cfg);
    const std::string conf = fmt("%g", a.det.conf);
    const std::string iou = fmt("%g", a.det.iou);
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"Params", model ? std::to_string(params) : "n/a"},
        {"Precision", fmt("%.6f", s.precision)},
        {"Recall", fmt("%.6f", s.recall)},
        {"AP50", fmt("%.6f", s.ap50)},
        {"AP50:95", fmt("%.6f", s.ap50_95)},
        {"GFLOPs", model ? fmt("%.4f", gflops) : "n/a"},
        {"FPS", model ? fmt("%.2f", fps) : "n/a"},
    };
    if (c.csv) {
        std::cout << "metric,value,config_hash,conf_thresh,iou_thresh\n";
        for (const auto& [name, value] : rows)
            std::cout << name << "," << value << "," << hash << "," << conf << "," << iou << "\n";
    } else {
        std::cout << "config " << hash << "; assumed thresholds: conf " << conf << ", NMS IoU " << iou
                  << ", match IoU 0.5 (AP50:95 sweeps 0.50..0.95), 101-point AP\n"
                  << "images: " << images.size() << "  TP " << s.counts.tp << "  FP " << s.counts.fp << "  FN "
                  << s.counts.fn << "\n";
        for (const auto& [name, value] : rows) std::printf("%-10s %s\n", name.c_str(), value.c_str());
    }
    if (s.no_ground_truth) std::cerr << "warning: no ground truth boxes; AP reported as 0\n";
    if (s.precision_degenerate) std::cerr << "warning: no predictions above threshold; precision reported as 0\n";
    return kOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
    std::string weights;
    std::string images_dir;
    int runs = 100;
    int warmup = 10;
    int count = 1;
    std::uint64_t seed = 0;
    double conf = 0.25;
    double iou = 0.45;
};

int cmd_bench(const Common& c, const BenchArgs& a) {
    const ModelConfig cfg = config_of(c);
    const Model m = model_from(cfg, a.weights, a.seed);
    std::vector<Image> images;
    if (!a.images_dir.empty()) {
        for (const auto& p : sorted_files(a.images_dir, is_image)) images.push_back(read_pnm(p));
    } else {
        Rng rng(a.seed);
        for (int i = 0; i < a.count; ++i) {
            Image img(640, 480);
            for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
            images.push_back(std::move(img));
        }
    }
    BenchmarkOptions opts;
    opts.runs = a.runs;
    opts.warmup = a.warmup;
    opts.detect = DetectOptions{a.conf, a.iou};
    const auto rep = fps_benchmark(m, images, opts);

    if (c.csv) {
        std::cout << "mode,phase,mean_ms,median_ms\n";
        for (const auto& r : rep.rows) {
            const std::string mode = to_string(r.mode);
            const std::pair<const char*, const PhaseStats*> phases[] = {
                {"preprocess", &r.preprocess}, {"forward", &r.forward}, {"postprocess", &r.postprocess},
                {"total", &r.total}};
            for (const auto& [name, st] : phases)
                std::cout << mode << "," << name << "," << fmt("%.4f", st->mean_ms) << ","
                          << fmt("%.4f", st->median_ms) << "\n";
        }
        std::cout << "mode,params,flops,fps,cv,deterministic,samples\n";
        for (const auto& r : rep.rows)
            std::cout << to_string(r.mode) << "," << r.params << "," << r.flops << "," << fmt("%.3f", r.fps) << ","
                      << fmt("%.4f", r.cv) << "," << (r.deterministic ? 1 : 0) << "," << r.samples << "\n";
        if (rep.speedup) std::cout << "speedup," << fmt("%.4f", *rep.speedup) << "\n";
        return kOk;
    }
    for (const auto& r : rep.rows) {
        std::cout << "[" << to_string(r.mode) << "] params " << r.params << ", FLOPs " << r.flops << "\n";
        std::printf("  %-12s %10s %10s\n", "phase", "mean ms", "median ms");
        std::printf("  %-12s %10.3f %10.3f\n", "preprocess", r.preprocess.mean_ms, r.preprocess.median_ms);
        std::printf("  %-12s %10.3f %10.3f\n", "forward", r.forward.mean_ms, r.forward.median_ms);
        std::printf("  %-12s %10.3f %10.3f\n", "postprocess", r.postprocess.mean_ms, r.postprocess.median_ms);
        std::printf("  %-12s %10.3f %10.3f\n", "total", r.total.mean_ms, r.total.median_ms);
        std::printf("  FPS %.2f, CV %.3f, %zu samples, outputs %s\n", r.fps, r.cv, r.samples,
                    r.deterministic ? "deterministic" : "NOT deterministic");
    }
    if (rep.speedup)
        std::cout << "deployed / train FPS: " << fmt("%.3f", *rep.speedup) << " (informational)\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rcsnet: reparameterized RCS detector toolkit"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config, "model config YAML (default: built-in nano config)")
        ->check(CLI::ExistingFile);
    app.add_flag("--csv", common.csv, "machine-readable CSV output");
    app.fallthrough();

    InitArgs init;
    auto* s_init = app.add_subcommand("init", "write seeded initial weights");
    s_init->add_option("--out", init.out, "output weight file")->required();
    s_init->add_option("--seed", init.seed, "initializer seed")->capture_default_str();
    s_init->add_flag("--deployed", init.deployed, "write reparameterized weights");

    FuseArgs fuse;
    auto* s_fuse = app.add_subcommand("fuse", "reparameterize train weights into deployed weights");
    s_fuse->add_option("--weights-in", fuse.in, "train-mode weight file")->required();
    s_fuse->add_option("--weights-out", fuse.out, "deployed weight file")->required();

    VerifyArgs verify;
    auto* s_verify = app.add_subcommand("verify", "compare train and reparameterized forwards");
    s_verify->add_option("--weights", verify.weights, "train-mode weight file")->required();
    s_verify->add_option("--trials", verify.trials, "random inputs")->capture_default_str()->check(CLI::PositiveNumber);
    s_verify->add_option("--tolerance", verify.tolerance, "max abs deviation")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    s_verify->add_option("--seed", verify.seed, "input seed")->capture_default_str();

    FlopsArgs flops_args;
    auto* s_flops = app.add_subcommand("flops", "per-layer FLOPs and MAC");
    s_flops->add_option("--paper-compare", flops_args.paper_compare, "C M N: RCS-OSA structural count")
        ->expected(3);
    s_flops->add_option("--weights", flops_args.weights, "weight file (default: seed-0 train model)");
    s_flops->add_flag("--deployed", flops_args.deployed, "analyze the reparameterized model");

    AnchorsArgs anchors;
    auto* s_anchors = app.add_subcommand("anchors", "k-means anchor clustering over label files");
    s_anchors->add_option("--labels-dir", anchors.labels_dir, "directory of .txt label files")->required();
    s_anchors->add_option("--k", anchors.k, "clusters")->capture_default_str()->check(CLI::PositiveNumber);
    s_anchors->add_option("--input-size", anchors.input_size, "pixel scale")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    s_anchors->add_option("--seed", anchors.seed, "seed")->capture_default_str();
    s_anchors->add_option("--distance", anchors.distance, "iou or euclidean")
        ->capture_default_str()
        ->check(CLI::IsMember({"iou", "euclidean"}));

    auto add_detect = [](CLI::App* s, DetectArgs& d) {
        s->add_option("--weights", d.weights, "weight file (default: seeded train model)");
        s->add_option("--conf", d.conf, "confidence threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
        s->add_option("--iou", d.iou, "NMS IoU threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    };

    InferArgs infer;
    auto* s_infer = app.add_subcommand("infer", "detect objects in one image");
    add_detect(s_infer, infer.det);
    s_infer->add_option("--image", infer.image, "PPM/PGM image")->required();
    s_infer->add_option("--seed", infer.seed, "model seed when no weights are given")->capture_default_str();

    EvalArgs eval;
    auto* s_eval = app.add_subcommand("eval", "precision, recall, AP50, AP50:95 over a labelled directory");
    add_detect(s_eval, eval.det);
    s_eval->add_option("--images-dir", eval.images_dir, "directory of PPM/PGM images")->required();
    s_eval->add_option("--labels-dir", eval.labels_dir, "directory of .txt labels")->required();
    s_eval->add_option("--predictions-dir", eval.predictions_dir, "score saved detection files instead of running the model");
    s_eval->add_option("--seed", eval.seed, "model seed when no weights are given")->capture_default_str();

    BenchArgs bench;
    auto* s_bench = app.add_subcommand("bench", "phase timings and FPS, train vs deployed");
    s_bench->add_option("--weights", bench.weights, "weight file (default: seeded train model)");
    s_bench->add_option("--images-dir", bench.images_dir, "images to time (default: synthetic)");
    s_bench->add_option("--runs", bench.runs, "timed passes")->capture_default_str()->check(CLI::PositiveNumber);
    s_bench->add_option("--warmup", bench.warmup, "untimed passes")->capture_default_str()->check(CLI::NonNegativeNumber);
    s_bench->add_option("--count", bench.count, "synthetic images")->capture_default_str()->check(CLI::PositiveNumber);
    s_bench->add_option("--seed", bench.seed, "seed")->capture_default_str();
    s_bench->add_option("--conf", bench.conf, "confidence threshold")->capture_default_str();
    s_bench->add_option("--iou", bench.iou, "NMS IoU threshold")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    configure_threads_from_env();
    try {
        if (*s_init) return cmd_init(common, init);
        if (*s_fuse) return cmd_fuse(common, fuse);
        if (*s_verify) return cmd_verify(common, verify);
        if (*s_flops) return cmd_flops(common, flops_args);
        if (*s_anchors) return cmd_anchors(common, anchors);
        if (*s_infer) return cmd_infer(common, infer);
        if (*s_eval) return cmd_eval(common, eval);
        if (*s_bench) return cmd_bench(common, bench);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kUsage;
}
