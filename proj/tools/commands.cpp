#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tubal/bench.hpp"
#include "tubal/cube_io.hpp"
#include "tubal/denoise.hpp"
#include "tubal/errors.hpp"
#include "tubal/metrics.hpp"
#include "tubal/noise.hpp"

namespace tubal::cli {

namespace {

// Failure in flag values that only becomes visible once inputs are loaded.
struct UsageError : Error {
    using Error::Error;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::string stage = "parse";
};

Dims parse_dims(const std::vector<std::size_t>& v) {
    if (v.size() != 3 || v[0] == 0 || v[1] == 0 || v[2] == 0) {
        throw UsageError("--dims expects three positive integers n1,n2,n3");
    }
    return {v[0], v[1], v[2]};
}

std::string shape(const Cube& c) { return to_string(c.dims()); }

// ---------------------------------------------------------------- denoise

struct DenoiseArgs {
    std::string input;
    std::size_t rank = 0;
    std::string card;
    double eps = 1e-6;
    std::size_t max_iter = 100;
    std::uint64_t seed = 0;
    double rank_tol = 0.0;
    std::string output_l;
    std::string output_s;
    std::string report;
    io::Dtype dtype = io::Dtype::f64;
};

int cmd_denoise(const DenoiseArgs& a, Context& ctx) {
    ctx.stage = "read input";
    const Cube x = io::read_cube(a.input);

    ctx.stage = "configure";
    const auto k = parse_card(a.card, x.size());
    if (!k) throw UsageError("--card expects an integer count or a fraction like 0.2f, got '" + a.card + "'");
    DenoiseConfig cfg;
    cfg.r = a.rank;
    cfg.k = *k;
    cfg.eps = a.eps;
    cfg.max_iter = a.max_iter;
    cfg.seed = {a.seed};
    cfg.rank_tol = a.rank_tol;
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    if (cfg.r > std::min(x.n1(), x.n2())) {
        throw UsageError("--rank " + std::to_string(cfg.r) + " exceeds min(n1, n2) of input " + shape(x));
    }

    ctx.stage = "solve";
    const DenoiseResult res = denoise(x, cfg);

    ctx.stage = "write output";
    io::write_cube(a.output_l, res.l, a.dtype);
    if (!a.output_s.empty()) io::write_cube(a.output_s, res.s, a.dtype);

    nlohmann::json j;
    j["iterations"] = res.iterations;
    j["final_residual"] = res.final_residual();
    j["residual_history"] = res.residual_history;
    j["effective_rank_history"] = res.effective_rank_history;
    j["elapsed_seconds"] = res.elapsed_seconds;
    j["diverged"] = res.diverged;
    j["best_iteration"] = res.best_iteration;
    j["config"] = {{"r", cfg.r},         {"k", cfg.k},       {"eps", cfg.eps},
                   {"max_iter", cfg.max_iter}, {"seed", cfg.seed.seed}, {"rank_tol", cfg.rank_tol}};
    if (!a.report.empty()) io::write_text(a.report, j.dump(2) + "\n");

    ctx.out << "denoised " << shape(x) << " in " << res.iterations << " iterations, final residual "
            << res.final_residual() << (res.diverged ? " (stopped on divergence)" : "") << '\n';
    return kOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string input;
    int preset = 0;
    std::string spec_file;
    std::optional<double> sigma;
    std::optional<double> impulse;
    std::optional<std::size_t> stripe_bands;
    std::optional<std::size_t> deadline_bands;
    std::optional<int> width_min;
    std::optional<int> width_max;
    std::optional<std::uint64_t> seed;
    bool no_normalize = false;
    std::string output;
    std::string mask;
    std::string output_clean;
    io::Dtype dtype = io::Dtype::f64;
};

int cmd_synth(const SynthArgs& a, Context& ctx) {
    ctx.stage = "configure";
    NoiseSpec spec;
    if (a.preset == 1) spec = case1_spec({0});
    if (a.preset == 2) spec = case2_spec({0});
    if (!a.spec_file.empty()) {
        ctx.stage = "read noise spec";
        spec = io::noise_spec_from_config(io::read_config(a.spec_file), spec);
        ctx.stage = "configure";
    }
    if (a.sigma) spec.gaussian_sigma = *a.sigma;
    if (a.impulse) spec.impulse_fraction = *a.impulse;
    if (a.stripe_bands) spec.stripe_bands = *a.stripe_bands;
    if (a.deadline_bands) spec.deadline_bands = *a.deadline_bands;
    if (a.width_min) spec.stripe_width_range.lo = spec.deadline_width_range.lo = *a.width_min;
    if (a.width_max) spec.stripe_width_range.hi = spec.deadline_width_range.hi = *a.width_max;
    if (a.seed) spec.seed = {*a.seed};
    try {
        spec.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }

    ctx.stage = "read input";
    const Cube clean = io::read_cube(a.input);

    ctx.stage = "synthesize";
    const Synthesized s = synthesize(clean, spec, !a.no_normalize);

    ctx.stage = "write output";
    io::write_cube(a.output, s.noisy, a.dtype);
    if (!a.mask.empty()) io::write_cube(a.mask, s.mask, a.dtype);
    if (!a.output_clean.empty()) io::write_cube(a.output_clean, s.clean, a.dtype);

    ctx.out << "# resolved noise spec\n" << io::noise_spec_to_config(spec);
    return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string ref;
    std::string test;
    std::string json;
    std::string csv;
};

int cmd_eval(const EvalArgs& a, Context& ctx) {
    ctx.stage = "read reference";
    const Cube ref = io::read_cube(a.ref);
    ctx.stage = "read test";
    const Cube test = io::read_cube(a.test);
    if (ref.dims() != test.dims()) {
        throw UsageError("shape mismatch: reference " + shape(ref) + " vs test " + shape(test));
    }
    ctx.stage = "evaluate";
    const QualityReport r = evaluate(ref, test);

    ctx.stage = "write output";
    if (!a.json.empty()) io::write_text(a.json, to_json(r) + "\n");
    if (!a.csv.empty()) io::write_text(a.csv, csv_header() + "\n" + to_csv_row(r) + "\n");
    ctx.out << "MPSNR " << r.mpsnr_db << " dB, MSSIM " << r.mssim << ", SAM " << r.sam_degrees
            << " deg\n";
    return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::vector<std::size_t> sizes{32, 64, 128};
    std::size_t rank = 5;
    std::size_t tube = 16;
    std::size_t trials = 3;
    std::uint64_t seed = 0;
    std::string csv;
};

int cmd_bench(const BenchArgs& a, Context& ctx) {
    ctx.stage = "configure";
    BenchOptions opt;
    opt.sizes = a.sizes;
    opt.r = a.rank;
    opt.n3 = a.tube;
    opt.trials = a.trials;
    opt.seed = {a.seed};
    if (opt.trials < 1 || opt.n3 < 1 || opt.sizes.empty()) throw UsageError("bench needs sizes, --tube >= 1 and --trials >= 1");
    for (const auto n : opt.sizes) {
        if (n < opt.r || opt.r < 1) throw UsageError("--rank must lie in [1, size] for every size");
    }

    ctx.stage = "benchmark";
    const auto records = run_bench(opt);

    ctx.stage = "write output";
    std::ostringstream csv;
    csv << bench_csv_header() << '\n';
    for (const auto& r : records) csv << to_csv_row(r) << '\n';
    if (!a.csv.empty()) io::write_text(a.csv, csv.str());
    ctx.out << csv.str();
    return kOk;
}

// ---------------------------------------------------------------- plant / import / band

struct PlantArgs {
    std::vector<std::size_t> dims;
    std::size_t rank = 3;
    std::uint64_t seed = 0;
    bool nonnegative = false;
    std::string output;
};

int cmd_plant(const PlantArgs& a, Context& ctx) {
    ctx.stage = "configure";
    const Dims d = parse_dims(a.dims);
    if (a.rank < 1 || a.rank > std::min(d.n1, d.n2)) throw UsageError("--rank must lie in [1, min(n1, n2)]");
    ctx.stage = "generate";
    const Cube x = planted_low_rank(d, a.rank, {a.seed}, a.nonnegative);
    ctx.stage = "write output";
    io::write_cube(a.output, x);
    ctx.out << "planted tubal-rank-" << a.rank << " cube " << to_string(d) << '\n';
    return kOk;
}

struct ImportArgs {
    std::string raw;
    std::vector<std::size_t> dims;
    std::string layout = "bsq";
    std::string dtype = "f32";
    std::string endian = "little";
    std::string output;
};

int cmd_import(const ImportArgs& a, Context& ctx) {
    ctx.stage = "configure";
    const Dims d = parse_dims(a.dims);
    io::RawFormat f;
    try {
        f.layout = io::parse_layout(a.layout);
        f.dtype = io::parse_dtype(a.dtype);
        f.endian = io::parse_endian(a.endian);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    ctx.stage = "read raw input";
    const Cube x = io::import_raw(a.raw, d, f);
    ctx.stage = "write output";
    io::write_cube(a.output, x);
    ctx.out << "imported " << to_string(d) << '\n';
    return kOk;
}

struct BandArgs {
    std::string input;
    std::size_t band = 0;
    std::string output;
};

// Binary PGM of one band, min-max scaled to 0..255.
int cmd_band(const BandArgs& a, Context& ctx) {
    ctx.stage = "read input";
    const Cube x = io::read_cube(a.input);
    if (a.band >= x.n3()) {
        throw UsageError("--band " + std::to_string(a.band) + " out of range for " + shape(x));
    }
    ctx.stage = "write output";
    const auto s = x.slice(a.band);
    const double lo = s.minCoeff();
    const double hi = s.maxCoeff();
    std::string pgm = "P5\n" + std::to_string(x.n2()) + " " + std::to_string(x.n1()) + "\n255\n";
    for (std::size_t i = 0; i < x.n1(); ++i) {
        for (std::size_t j = 0; j < x.n2(); ++j) {
            const double t = hi > lo ? (x(i, j, a.band) - lo) / (hi - lo) : 0.0;
            pgm.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
        }
    }
    io::write_text(a.output, pgm);
    return kOk;
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const IoError*>(&e) != nullptr) return kIo;
    if (dynamic_cast<const UsageError*>(&e) != nullptr || dynamic_cast<const InvalidArgument*>(&e) != nullptr ||
        dynamic_cast<const SpecExceedsDims*>(&e) != nullptr || dynamic_cast<const TooSmall*>(&e) != nullptr) {
        return kUsage;
    }
    return kSolver;
}

} // namespace

std::optional<std::size_t> parse_card(const std::string& text, std::size_t total) {
    if (text.empty()) return std::nullopt;
    try {
        std::size_t pos = 0;
        if (text.back() == 'f') {
            const std::string body = text.substr(0, text.size() - 1);
            const double frac = std::stod(body, &pos);
            if (pos != body.size() || !(frac >= 0.0 && frac <= 1.0)) return std::nullopt;
            return static_cast<std::size_t>(std::llround(frac * static_cast<double>(total)));
        }
        if (text.front() == '-') return std::nullopt;
        const unsigned long long k = std::stoull(text, &pos);
        if (pos != text.size()) return std::nullopt;
        return static_cast<std::size_t>(k);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Low-tubal-rank hyperspectral denoising toolkit", "tubal"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    DenoiseArgs dn;
    auto* denoise_cmd = app.add_subcommand("denoise", "Recover low-tubal-rank + sparse parts of a cube");
    denoise_cmd->add_option("--input", dn.input, "Noisy HSC1 cube")->required();
    denoise_cmd->add_option("--rank", dn.rank, "Tubal rank budget r")->required();
    denoise_cmd->add_option("--card", dn.card, "Sparse budget k: count, or fraction of entries like 0.2f")->required();
    denoise_cmd->add_option("--eps", dn.eps, "Relative squared-residual stopping threshold")->required();
    denoise_cmd->add_option("--max-iter", dn.max_iter, "Iteration cap")->capture_default_str();
    denoise_cmd->add_option("--seed", dn.seed, "RNG seed")->capture_default_str();
    denoise_cmd->add_option("--rank-tol", dn.rank_tol, "Absolute rank tolerance (0 = automatic)")->capture_default_str();
    denoise_cmd->add_option("--output-l", dn.output_l, "Output low-rank cube")->required();
    denoise_cmd->add_option("--output-s", dn.output_s, "Output sparse cube");
    denoise_cmd->add_option("--report", dn.report, "JSON report path");

    SynthArgs sy;
    auto* synth_cmd = app.add_subcommand("synth", "Corrupt a clean cube with synthetic mixed noise");
    synth_cmd->add_option("--input", sy.input, "Clean HSC1 cube")->required();
    synth_cmd->add_option("--case", sy.preset, "Noise preset: 1 or 2")->check(CLI::IsMember({1, 2}));
    synth_cmd->add_option("--spec", sy.spec_file, "key = value noise spec file");
    synth_cmd->add_option("--sigma", sy.sigma, "Gaussian standard deviation");
    synth_cmd->add_option("--impulse", sy.impulse, "Salt-and-pepper fraction of entries");
    synth_cmd->add_option("--stripe-bands", sy.stripe_bands, "Bands receiving stripes");
    synth_cmd->add_option("--deadline-bands", sy.deadline_bands, "Bands receiving deadlines");
    synth_cmd->add_option("--width-min", sy.width_min, "Minimum stripe/deadline width in lines");
    synth_cmd->add_option("--width-max", sy.width_max, "Maximum stripe/deadline width in lines");
    synth_cmd->add_option("--seed", sy.seed, "RNG seed")->required();
    synth_cmd->add_flag("--no-normalize", sy.no_normalize, "Skip band-wise normalization to [0, 1]");
    synth_cmd->add_option("--output", sy.output, "Noisy cube output")->required();
    synth_cmd->add_option("--mask", sy.mask, "Mask cube output (1 = impulse/stripe/deadline)");
    synth_cmd->add_option("--output-clean", sy.output_clean, "Normalized clean cube output");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "MPSNR / MSSIM / SAM between two cubes");
    eval_cmd->add_option("--ref", ev.ref, "Reference cube")->required();
    eval_cmd->add_option("--test", ev.test, "Test cube")->required();
    eval_cmd->add_option("--json", ev.json, "JSON report path");
    eval_cmd->add_option("--csv", ev.csv, "CSV report path");

    BenchArgs be;
    auto* bench_cmd = app.add_subcommand("bench", "Time truncated t-SVD against t-BRP");
    bench_cmd->add_option("--sizes", be.sizes, "Comma-separated n values")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--rank", be.rank, "Tubal rank")->capture_default_str();
    bench_cmd->add_option("--tube", be.tube, "Tube length n3")->capture_default_str();
    bench_cmd->add_option("--trials", be.trials, "Trials per size (median reported)")->capture_default_str();
    bench_cmd->add_option("--seed", be.seed, "RNG seed")->capture_default_str();
    bench_cmd->add_option("--csv", be.csv, "CSV output path");

    PlantArgs pl;
    auto* plant_cmd = app.add_subcommand("plant", "Generate a cube of exact tubal rank");
    plant_cmd->add_option("--dims", pl.dims, "n1,n2,n3")->delimiter(',')->required();
    plant_cmd->add_option("--rank", pl.rank, "Tubal rank")->capture_default_str();
    plant_cmd->add_option("--seed", pl.seed, "RNG seed")->capture_default_str();
    plant_cmd->add_flag("--nonnegative", pl.nonnegative, "Uniform factors, entries scaled into [0, 1]");
    plant_cmd->add_option("--output", pl.output, "Output cube")->required();

    ImportArgs im;
    auto* import_cmd = app.add_subcommand("import", "Convert a headerless raw cube to HSC1");
    import_cmd->add_option("--raw", im.raw, "Raw input file")->required();
    import_cmd->add_option("--dims", im.dims, "n1,n2,n3 (rows, columns, bands)")->delimiter(',')->required();
    import_cmd->add_option("--layout", im.layout, "bsq or bip")->capture_default_str();
    import_cmd->add_option("--dtype", im.dtype, "f32 or f64")->capture_default_str();
    import_cmd->add_option("--endian", im.endian, "little or big")->capture_default_str();
    import_cmd->add_option("--output", im.output, "Output cube")->required();

    BandArgs ba;
    auto* band_cmd = app.add_subcommand("band", "Write one band as an 8-bit PGM image");
    band_cmd->add_option("--input", ba.input, "Cube")->required();
    band_cmd->add_option("--band", ba.band, "0-based band index")->required();
    band_cmd->add_option("--output", ba.output, "PGM output")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    Context ctx{out, err};
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (denoise_cmd->parsed()) return cmd_denoise(dn, ctx);
        if (synth_cmd->parsed()) return cmd_synth(sy, ctx);
        if (eval_cmd->parsed()) return cmd_eval(ev, ctx);
        if (bench_cmd->parsed()) return cmd_bench(be, ctx);
        if (plant_cmd->parsed()) return cmd_plant(pl, ctx);
        if (import_cmd->parsed()) return cmd_import(im, ctx);
        if (band_cmd->parsed()) return cmd_band(ba, ctx);
    } catch (const Error& e) {
        err << "tubal " << name << ": " << ctx.stage << " failed: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "tubal " << name << ": " << ctx.stage << " failed: " << e.what() << '\n';
        return kSolver;
    }
    return kUsage;
}

} // namespace tubal::cli
