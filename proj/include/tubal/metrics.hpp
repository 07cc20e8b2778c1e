#pragma once

#include <string>
#include <vector>

#include "tubal/cube.hpp"

namespace tubal {

using BandView = Eigen::Ref<const RowMatrix>;

struct QualityReport {
    double mpsnr_db = 0.0;
    double mssim = 0.0;
    double sam_degrees = 0.0;
    std::vector<double> per_band_psnr;
    std::vector<double> per_band_ssim;
};

/// Reported PSNR for a zero-error band.
inline constexpr double kPsnrCapDb = 100.0;

/// 10 log10(peak^2 / MSE), capped at kPsnrCapDb.
double psnr_band(const BandView& ref, const BandView& test, double peak = 1.0);

/// Mean local SSIM over every full 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range 1. Throws TooSmall below 11x11.
double ssim_band(const BandView& ref, const BandView& test);

/// Mean spectral angle in degrees over pixels whose spectra are both nonzero.
double sam(const Cube& ref, const Cube& test);

QualityReport evaluate(const Cube& ref, const Cube& test);

std::string to_json(const QualityReport& report);
/// "mpsnr_db,mssim,sam_degrees"
std::string csv_header();
std::string to_csv_row(const QualityReport& report);

} // namespace tubal
