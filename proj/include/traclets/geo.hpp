#pragma once

#include "traclets/model.hpp"

#include <cmath>
#include <numbers>

namespace traclets {

inline constexpr double kEarthRadiusM = 6'371'000.0;

inline constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
inline double haversine_m(double lon1, double lat1, double lon2, double lat2) noexcept {
    const double phi1 = deg_to_rad(lat1);
    const double phi2 = deg_to_rad(lat2);
    const double dphi = deg_to_rad(lat2 - lat1);
    const double dlambda = deg_to_rad(lon2 - lon1);
    const double s_phi = std::sin(dphi / 2.0);
    const double s_lambda = std::sin(dlambda / 2.0);
    double h = s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lambda * s_lambda;
    h = std::min(1.0, h);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

inline double haversine_m(const Position& a, const Position& b) noexcept {
    return haversine_m(a.lon, a.lat, b.lon, b.lat);
}

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
};

/// Inverse transverse Mercator on the WGS84 ellipsoid (UTM conventions:
/// k0 = 0.9996, false easting 500 km, false northing 10,000 km south).
inline LonLat utm_to_lonlat(double easting, double northing, int zone, bool northern) {
    constexpr double a = 6378137.0;
    constexpr double f = 1.0 / 298.257223563;
    constexpr double k0 = 0.9996;
    const double e2 = f * (2.0 - f);
    const double ep2 = e2 / (1.0 - e2);

    const double x = easting - 500'000.0;
    const double y = northern ? northing : northing - 10'000'000.0;
    const double lon0 = deg_to_rad((zone - 1) * 6.0 - 180.0 + 3.0);

    const double m = y / k0;
    const double mu = m / (a * (1.0 - e2 / 4.0 - 3.0 * e2 * e2 / 64.0 - 5.0 * e2 * e2 * e2 / 256.0));
    const double sq = std::sqrt(1.0 - e2);
    const double e1 = (1.0 - sq) / (1.0 + sq);
    const double phi1 = mu + (3.0 * e1 / 2.0 - 27.0 * std::pow(e1, 3) / 32.0) * std::sin(2.0 * mu) +
                        (21.0 * e1 * e1 / 16.0 - 55.0 * std::pow(e1, 4) / 32.0) * std::sin(4.0 * mu) +
                        (151.0 * std::pow(e1, 3) / 96.0) * std::sin(6.0 * mu) +
                        (1097.0 * std::pow(e1, 4) / 512.0) * std::sin(8.0 * mu);

    const double sin1 = std::sin(phi1);
    const double cos1 = std::cos(phi1);
    const double tan1 = std::tan(phi1);
    const double w = 1.0 - e2 * sin1 * sin1;
    const double n1 = a / std::sqrt(w);
    const double t1 = tan1 * tan1;
    const double c1 = ep2 * cos1 * cos1;
    const double r1 = a * (1.0 - e2) / std::pow(w, 1.5);
    const double d = x / (n1 * k0);

    const double lat =
        phi1 - (n1 * tan1 / r1) *
                   (d * d / 2.0 -
                    (5.0 + 3.0 * t1 + 10.0 * c1 - 4.0 * c1 * c1 - 9.0 * ep2) * std::pow(d, 4) / 24.0 +
                    (61.0 + 90.0 * t1 + 298.0 * c1 + 45.0 * t1 * t1 - 252.0 * ep2 - 3.0 * c1 * c1) *
                        std::pow(d, 6) / 720.0);
    const double lon =
        lon0 + (d - (1.0 + 2.0 * t1 + c1) * std::pow(d, 3) / 6.0 +
                (5.0 - 2.0 * c1 + 28.0 * t1 - 3.0 * c1 * c1 + 8.0 * ep2 + 24.0 * t1 * t1) *
                    std::pow(d, 5) / 120.0) /
                   cos1;
    return {rad_to_deg(lon), rad_to_deg(lat)};
}

} // namespace traclets
