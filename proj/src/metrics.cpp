#include "tubal/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tubal/errors.hpp"

namespace tubal {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> taps{};
    const int half = kWindow / 2;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - half;
        taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    }
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (auto& t : taps) t /= sum;
    return taps;
}

// Separable 'valid' correlation with the normalized 11x11 Gaussian window.
RowMatrix filter_valid(const RowMatrix& m) {
    static const auto taps = gaussian_taps();
    const Eigen::Index rows = m.rows();
    const Eigen::Index cols = m.cols() - kWindow + 1;
    RowMatrix horizontal = RowMatrix::Zero(rows, cols);
    for (int t = 0; t < kWindow; ++t) horizontal += taps[static_cast<std::size_t>(t)] * m.middleCols(t, cols);
    const Eigen::Index out_rows = rows - kWindow + 1;
    RowMatrix out = RowMatrix::Zero(out_rows, cols);
    for (int t = 0; t < kWindow; ++t) out += taps[static_cast<std::size_t>(t)] * horizontal.middleRows(t, out_rows);
    return out;
}

void require_same(const Dims& a, const Dims& b, const char* what) {
    if (a != b) {
        throw DimMismatch(std::string(what) + ": reference " + to_string(a) + " vs test " +
                          to_string(b));
    }
}

} // namespace

double psnr_band(const BandView& ref, const BandView& test, double peak) {
    if (ref.rows() != test.rows() || ref.cols() != test.cols()) {
        throw DimMismatch("psnr: band shapes differ");
    }
    if (!(peak > 0.0)) throw InvalidArgument("psnr peak must be positive");
    const double mse = (ref - test).squaredNorm() / static_cast<double>(ref.size());
    if (mse == 0.0) return kPsnrCapDb;
    return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / mse));
}

double ssim_band(const BandView& ref, const BandView& test) {
    if (ref.rows() != test.rows() || ref.cols() != test.cols()) {
        throw DimMismatch("ssim: band shapes differ");
    }
    if (ref.rows() < kWindow || ref.cols() < kWindow) {
        throw TooSmall("ssim needs bands of at least 11x11, got " + std::to_string(ref.rows()) +
                       "x" + std::to_string(ref.cols()));
    }
    const RowMatrix x = ref;
    const RowMatrix y = test;
    const RowMatrix mu_x = filter_valid(x);
    const RowMatrix mu_y = filter_valid(y);
    const RowMatrix xx = filter_valid(x.cwiseProduct(x));
    const RowMatrix yy = filter_valid(y.cwiseProduct(y));
    const RowMatrix xy = filter_valid(x.cwiseProduct(y));

    const auto mx = mu_x.array();
    const auto my = mu_y.array();
    const auto var_x = xx.array() - mx * mx;
    const auto var_y = yy.array() - my * my;
    const auto cov = xy.array() - mx * my;
    const Eigen::ArrayXXd num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
    const Eigen::ArrayXXd den = (mx * mx + my * my + kC1) * (var_x + var_y + kC2);
    return (num / den).mean();
}

double sam(const Cube& ref, const Cube& test) {
    require_same(ref.dims(), test.dims(), "sam");
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < ref.n1(); ++i) {
        for (std::size_t j = 0; j < ref.n2(); ++j) {
            double dot = 0.0;
            double nr = 0.0;
            double nt = 0.0;
            for (std::size_t k = 0; k < ref.n3(); ++k) {
                const double a = ref(i, j, k);
                const double b = test(i, j, k);
                dot += a * b;
                nr += a * a;
                nt += b * b;
            }
            if (nr == 0.0 || nt == 0.0) continue;
            const double c = std::clamp(dot / (std::sqrt(nr) * std::sqrt(nt)), -1.0, 1.0);
            total += std::acos(c);
            ++counted;
        }
    }
    if (counted == 0) throw AllPixelsDegenerate("every pixel has a zero spectrum");
    return total / static_cast<double>(counted) * 180.0 / std::numbers::pi;
}

QualityReport evaluate(const Cube& ref, const Cube& test) {
    require_same(ref.dims(), test.dims(), "evaluate");
    QualityReport r;
    for (std::size_t k = 0; k < ref.n3(); ++k) {
        r.per_band_psnr.push_back(psnr_band(ref.slice(k), test.slice(k)));
        r.per_band_ssim.push_back(ssim_band(ref.slice(k), test.slice(k)));
    }
    const auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    r.mpsnr_db = mean(r.per_band_psnr);
    r.mssim = mean(r.per_band_ssim);
    r.sam_degrees = sam(ref, test);
    return r;
}

std::string to_json(const QualityReport& report) {
    nlohmann::json j;
    j["mpsnr_db"] = report.mpsnr_db;
    j["mssim"] = report.mssim;
    j["sam_degrees"] = report.sam_degrees;
    j["per_band_psnr"] = report.per_band_psnr;
    j["per_band_ssim"] = report.per_band_ssim;
    return j.dump(2);
}

std::string csv_header() { return "mpsnr_db,mssim,sam_degrees"; }

std::string to_csv_row(const QualityReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << report.mpsnr_db << ',' << report.mssim << ',' << report.sam_degrees;
    return os.str();
}

} // namespace tubal
