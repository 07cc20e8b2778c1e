// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "commands.hpp"
#include "oracles.hpp"
#include "tubal/bench.hpp"
#include "tubal/brp.hpp"
#include "tubal/cube_io.hpp"
#include "tubal/denoise.hpp"
#include "tubal/errors.hpp"
#include "tubal/metrics.hpp"
#include "tubal/noise.hpp"
#include "tubal/tproduct.hpp"
#include "tubal/tsvd.hpp"

using namespace tubal;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// (F_n3 kron I_n1) bcirc(a) (F_n3^-1 kron I_n2), assembled densely.
Eigen::MatrixXcd fourier_conjugated_bcirc(const Cube& a) {
    const std::size_t n1 = a.n1(), n2 = a.n2(), n3 = a.n3();
    Eigen::MatrixXcd f(n3, n3);
    for (std::size_t p = 0; p < n3; ++p)
        for (std::size_t q = 0; q < n3; ++q)
            f(p, q) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(p * q) / static_cast<double>(n3));
    const Eigen::MatrixXcd finv = f.adjoint() / static_cast<double>(n3);
    const Eigen::MatrixXcd left = Eigen::kroneckerProduct(f, Eigen::MatrixXcd::Identity(n1, n1));
    const Eigen::MatrixXcd right = Eigen::kroneckerProduct(finv, Eigen::MatrixXcd::Identity(n2, n2));
    return left * oracle::bcirc(a).cast<std::complex<double>>() * right;
}

Verdict algebra_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 eng(20240501);
    std::uniform_int_distribution<std::size_t> side(1, 6), tube(1, 4);
    double worst_prod = 0.0, worst_block = 0.0;
    const int instances = 150;
    for (int i = 0; i < instances; ++i) {
        const std::size_t n1 = side(eng), n2 = side(eng), l = side(eng), n3 = tube(eng);
        const Cube a = oracle::random_cube({n1, n2, n3}, eng());
        const Cube b = oracle::random_cube({n2, l, n3}, eng());
        worst_prod = std::max(worst_prod, relative_error(tprod(a, b), oracle::bcirc_product(a, b)));

        const Eigen::MatrixXcd d = fourier_conjugated_bcirc(a);
        const SpectralCube af = dft_tubes(a);
        Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(d.rows(), d.cols());
        for (std::size_t k = 0; k < n3; ++k)
            expected.block(k * n1, k * n2, n1, n2) = af.slice(k);
        worst_block = std::max(worst_block, (d - expected).norm() / d.norm());
    }
    const double elapsed = seconds_since(t0);
    return {worst_prod <= 1e-10 && worst_block <= 1e-10 && elapsed < 10.0,
            std::to_string(instances) + " instances, max tprod rel err " + fmt("%.2e", worst_prod) +
                ", max block-diag rel err " + fmt("%.2e", worst_block) + ", " + fmt("%.2f", elapsed) + " s"};
}

Verdict tsvd_validity() {
    const auto t0 = Clock::now();
    std::mt19937_64 eng(77);
    std::uniform_int_distribution<std::size_t> d1(1, 10), d2(1, 8), d3(1, 6);
    double orth = 0.0, recon = 0.0, offdiag = 0.0;
    bool ordered = true;
    const int cubes = 60;
    for (int i = 0; i < cubes; ++i) {
        const std::size_t n1 = d1(eng), n2 = d2(eng), n3 = d3(eng);
        const Cube x = oracle::random_cube({n1, n2, n3}, eng());
        const TsvdFactors f = tsvd(x);
        orth = std::max({orth, (tprod(ttranspose(f.u), f.u) - identity_tensor(n1, n3)).frobenius_norm(),
                         (tprod(ttranspose(f.v), f.v) - identity_tensor(n2, n3)).frobenius_norm()});
        recon = std::max(recon, relative_error(tprod(tprod(f.u, f.s), ttranspose(f.v)), x));
        const SpectralCube sf = dft_tubes(f.s);
        const double scale = std::max(1e-300, sf.max_abs());
        for (std::size_t k = 0; k < n3; ++k) {
            const ComplexRowMatrix s = sf.slice(k);
            for (Eigen::Index r = 0; r < s.rows(); ++r) {
                for (Eigen::Index c = 0; c < s.cols(); ++c) {
                    if (r != c) {
                        offdiag = std::max(offdiag, std::abs(s(r, c)) / scale);
                    } else {
                        offdiag = std::max(offdiag, std::abs(s(r, c).imag()) / scale);
                        if (s(r, c).real() < -1e-12 * scale) ordered = false;
                        if (r > 0 && s(r, c).real() > s(r - 1, c - 1).real() + 1e-12 * scale) ordered = false;
                    }
                }
            }
        }
    }
    const double elapsed = seconds_since(t0);
    return {orth <= 1e-8 && recon <= 1e-8 && offdiag <= 1e-10 && ordered && elapsed < 10.0,
            std::to_string(cubes) + " cubes, orthogonality " + fmt("%.2e", orth) + ", reconstruction " +
                fmt("%.2e", recon) + ", off-diagonal " + fmt("%.2e", offdiag) +
                (ordered ? "" : ", ORDER VIOLATED") + ", " + fmt("%.2f", elapsed) + " s"};
}

Verdict brp_exact_recovery() {
    const auto t0 = Clock::now();
    const std::vector<Dims> shapes = {{64, 64, 16}, {48, 40, 12}, {32, 64, 8}, {64, 24, 16}, {20, 20, 5}};
    double worst = 0.0;
    int runs = 0;
    for (std::size_t r = 1; r <= 5; ++r) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Dims d = shapes[(seed + r) % shapes.size()];
            const Cube x = planted_low_rank(d, r, RngSeed{1000 * r + seed});
            const LowRankApprox a = low_tubal_rank_approx(x, r, RngSeed{7 + seed});
            worst = std::max(worst, relative_error(a.l, x));
            ++runs;
        }
    }
    const double elapsed = seconds_since(t0);
    return {worst <= 1e-7 && elapsed < 30.0,
            std::to_string(runs) + " runs (r = 1..5, 20 seeds each), max rel err " + fmt("%.2e", worst) + ", " +
                fmt("%.2f", elapsed) + " s"};
}

Verdict rank_shrink() {
    const Cube x = planted_low_rank({40, 36, 8}, 2, RngSeed{4242});
    const LowRankApprox a = low_tubal_rank_approx(x, 6, RngSeed{99});
    const double err = relative_error(a.l, x);
    return {a.effective_r == 2 && err <= 1e-7 && a.restarts >= 1,
            "requested r = 6, effective r = " + std::to_string(a.effective_r) + ", restarts " +
                std::to_string(a.restarts) + ", rel err " + fmt("%.2e", err)};
}

Verdict sstep_optimality() {
    std::mt19937_64 eng(5);
    std::uniform_int_distribution<int> small(-4, 4);
    std::normal_distribution<double> normal;
    std::size_t cases = 0, mismatches = 0;
    for (std::size_t n1 = 1; n1 <= 12; ++n1) {
        for (std::size_t n2 = 1; n1 * n2 <= 12; ++n2) {
            for (std::size_t n3 = 1; n1 * n2 * n3 <= 12; ++n3) {
                for (int trial = 0; trial < 12; ++trial) {
                    Cube x(n1, n2, n3);
                    for (auto& v : x.data()) v = trial % 2 ? normal(eng) : static_cast<double>(small(eng));
                    const std::vector<double> v(x.data().begin(), x.data().end());
                    for (std::size_t k = 0; k <= 3; ++k) {
                        const Cube s = hard_threshold(x, k);
                        const bool ok = s.count_nonzero() <= k &&
                                        objective(x, Cube(x.dims()), s) == oracle::best_sparse_residual(v, k);
                        mismatches += !ok;
                        ++cases;
                    }
                }
            }
        }
    }
    return {mismatches == 0, std::to_string(cases) + " (cube, k) cases over every shape with <= 12 entries, " +
                                 std::to_string(mismatches) + " mismatches"};
}

Verdict planted_end_to_end() {
    const auto t0 = Clock::now();
    std::vector<double> gains, sam_ratios;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Cube l0 = planted_low_rank({64, 64, 20}, 3, RngSeed{seed}, true);
        const Synthesized noisy = synthesize(l0, case1_spec(RngSeed{100 + seed}), false);
        DenoiseConfig cfg;
        cfg.r = 3;
        cfg.k = noisy.mask.count_nonzero();
        cfg.eps = 1e-6;
        cfg.seed = RngSeed{200 + seed};
        const DenoiseResult res = denoise(noisy.noisy, cfg);
        const QualityReport before = evaluate(l0, noisy.noisy);
        const QualityReport after = evaluate(l0, res.l);
        gains.push_back(after.mpsnr_db - before.mpsnr_db);
        sam_ratios.push_back(after.sam_degrees / before.sam_degrees);
    }
    const double elapsed = seconds_since(t0);
    const double gain = median(gains);
    const double ratio = median(sam_ratios);
    return {gain >= 15.0 && ratio <= 0.5 && elapsed < 60.0,
            "median MPSNR gain " + fmt("%.2f", gain) + " dB, median SAM ratio " + fmt("%.3f", ratio) + ", " +
                fmt("%.2f", elapsed) + " s"};
}

Verdict speed_trend() {
    const auto t0 = Clock::now();
    BenchOptions opt;
    opt.sizes = {64, 128, 256};
    opt.n3 = 16;
    opt.r = 5;
    opt.trials = 5;
    opt.seed = RngSeed{31};
    const auto records = run_bench(opt);
    std::vector<double> ratios;
    double tbrp_256 = 0.0, tsvd_256 = 0.0;
    for (const std::size_t n : opt.sizes) {
        double tb = 0.0, ts = 0.0;
        for (const auto& r : records) {
            if (r.dims.n1 != n) continue;
            (r.method == BenchMethod::tbrp ? tb : ts) = r.wall_seconds;
        }
        ratios.push_back(tb / ts);
        if (n == 256) {
            tbrp_256 = tb;
            tsvd_256 = ts;
        }
    }
    const bool decreasing = ratios[0] > ratios[1] && ratios[1] > ratios[2];
    const double elapsed = seconds_since(t0);
    return {decreasing && tbrp_256 < tsvd_256 && elapsed < 300.0,
            "t-BRP/t-SVD time ratio " + fmt("%.4f", ratios[0]) + " -> " + fmt("%.4f", ratios[1]) + " -> " +
                fmt("%.4f", ratios[2]) + " for n = 64, 128, 256; n = 256: " + fmt("%.4f", tbrp_256) + " s vs " +
                fmt("%.4f", tsvd_256) + " s, " + fmt("%.1f", elapsed) + " s total"};
}

using Bytes = std::vector<unsigned char>;

void write_bytes(const fs::path& p, const Bytes& b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template<typename E>
bool raises(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const E&) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

// True when fn throws an IoError that is none of the specific subclasses.
bool raises_plain_io(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const BadMagic&) {
        return false;
    } catch (const TruncatedFile&) {
        return false;
    } catch (const BadDtype&) {
        return false;
    } catch (const SizeMismatch&) {
        return false;
    } catch (const BadLayout&) {
        return false;
    } catch (const IoError&) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

Verdict format_golden(const fs::path& dir) {
    std::vector<std::string> failed;
    const auto check = [&](bool ok, const std::string& what) {
        if (!ok) failed.push_back(what);
    };

    Cube x = oracle::random_cube({7, 5, 3}, 8, -1e3, 1e3);
    x(0, 0, 0) = std::numeric_limits<double>::denorm_min();
    io::write_cube(dir / "rt.hsc", x);
    const Cube y = io::read_cube(dir / "rt.hsc");
    check(y.dims() == x.dims() && std::memcmp(x.data().data(), y.data().data(), x.size() * 8) == 0,
          "bitwise round trip");

    const Bytes header = {'H', 'S', 'C', '1', 3, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0};
    Bytes golden = header;
    for (int i = 0; i < 6; ++i) {
        const auto bits = std::bit_cast<std::uint64_t>(static_cast<double>(i) - 2.5);
        for (int b = 0; b < 8; ++b) golden.push_back(static_cast<unsigned char>(bits >> (8 * b)));
    }
    write_bytes(dir / "golden.hsc", golden);
    const io::CubeHeader h = io::read_header(dir / "golden.hsc");
    const Cube g = io::read_cube(dir / "golden.hsc");
    check(h.n1 == 3 && h.n2 == 2 && h.n3 == 1 && h.dtype == io::Dtype::f64 && g(2, 1, 0) == 2.5 &&
              g(0, 0, 0) == -2.5,
          "golden header");

    const auto corrupt = [&](const std::string& name, auto&& edit) {
        Bytes b = golden;
        edit(b);
        write_bytes(dir / name, b);
        return dir / name;
    };
    const fs::path magic = corrupt("magic.hsc", [](Bytes& b) { b[0] = 'X'; });
    const fs::path trunc = corrupt("trunc.hsc", [](Bytes& b) { b.resize(b.size() - 3); });
    const fs::path dtype = corrupt("dtype.hsc", [](Bytes& b) { b[16] = 9; });
    const fs::path reserved = corrupt("reserved.hsc", [](Bytes& b) { b[19] = 1; });
    check(raises<BadMagic>([&] { io::read_cube(magic); }), "BadMagic");
    check(raises<TruncatedFile>([&] { io::read_cube(trunc); }), "TruncatedFile");
    check(raises<BadDtype>([&] { io::read_cube(dtype); }), "BadDtype");
    check(raises_plain_io([&] { io::read_cube(reserved); }), "IoError");

    write_bytes(dir / "short.raw", Bytes(10, 0));
    check(raises<SizeMismatch>([&] { io::import_raw(dir / "short.raw", {2, 2, 2}, {}); }), "SizeMismatch");
    check(raises<BadLayout>([] { io::parse_layout("bil"); }), "BadLayout");

    std::string detail = "round trip, golden header, BadMagic, TruncatedFile, BadDtype, IoError, "
                         "SizeMismatch, BadLayout";
    if (!failed.empty()) {
        detail = "failed:";
        for (const auto& f : failed) detail += " " + f;
    }
    return {failed.empty(), detail};
}

Verdict determinism(const fs::path& dir) {
    const Cube l0 = planted_low_rank({32, 32, 10}, 3, RngSeed{3}, true);
    io::write_cube(dir / "noisy.hsc", synthesize(l0, case1_spec(RngSeed{4}), false).noisy);
    std::vector<std::string> l_bytes, s_bytes;
    std::vector<nlohmann::json> histories;
    for (const char* tag : {"a", "b"}) {
        const std::string t(tag);
        std::ostringstream out, err;
        const int code = cli::run({"denoise", "--input", (dir / "noisy.hsc").string(), "--rank", "3", "--card",
                                    "0.2f", "--eps", "1e-6", "--max-iter", "30", "--seed", "1234", "--output-l",
                                    (dir / ("l_" + t + ".hsc")).string(), "--output-s",
                                    (dir / ("s_" + t + ".hsc")).string(), "--report",
                                    (dir / ("r_" + t + ".json")).string()},
                                   out, err);
        if (code != cli::kOk) return {false, "denoise exited with " + std::to_string(code) + ": " + err.str()};
        l_bytes.push_back(slurp(dir / ("l_" + t + ".hsc")));
        s_bytes.push_back(slurp(dir / ("s_" + t + ".hsc")));
        histories.push_back(nlohmann::json::parse(slurp(dir / ("r_" + t + ".json")))["residual_history"]);
    }
    const bool same = l_bytes[0] == l_bytes[1] && s_bytes[0] == s_bytes[1] && histories[0] == histories[1];
    return {same && !histories[0].empty(),
            std::string(same ? "identical" : "DIFFERENT") + " L/S cubes (" + std::to_string(l_bytes[0].size()) +
                " bytes each) and residual_history (" + std::to_string(histories[0].size()) + " entries)"};
}

} // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "tubal_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"algebra oracle equivalence", algebra_oracle},
        {"t-SVD validity", tsvd_validity},
        {"BRP exact recovery", brp_exact_recovery},
        {"rank-shrink path", rank_shrink},
        {"S-step brute-force optimality", sstep_optimality},
        {"planted end-to-end recovery", planted_end_to_end},
        {"speed trend", speed_trend},
        {"format golden tests", [&] { return format_golden(dir); }},
        {"determinism", [&] { return determinism(dir); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << v.detail
                  << std::endl;
    }
    fs::remove_all(dir);
    return failures == 0 ? 0 : 1;
}
