#pragma once

#include <cmath>

#include "crosstrack/errors.hpp"

namespace crosstrack {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Guards for the 1/x_north singularity of the pinhole model.
inline constexpr double kEpsilonDepth = 0.5;    // meters
inline constexpr double kMinDisparity = 0.5;    // pixels

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wrap an angle into (-pi, pi].
inline double normalize_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a <= 0.0) a += 2.0 * kPi;
    return a - kPi;
}

struct CameraIntrinsics {
    double f_u = 1000.0;      // focal length in pixels
    double b_prime = 0.4;     // stereo baseline in meters
    double c_u = 512.0;       // principal column in pixels
    double c_v = 384.0;       // principal row in pixels
    int width = 1024;
    int height = 768;

    bool valid() const {
        return f_u > 0.0 && b_prime > 0.0 && c_u >= 0.0 && c_u < width &&
               c_v >= 0.0 && c_v < height && width > 0 && height > 0;
    }
};

// Position in the camera-local ground plane: forward of the camera and to
// its right, both in meters.
struct CameraPoint {
    double x_north_cam = 0.0;
    double x_east_cam = 0.0;
};

// Position in the map (ENU ground) frame, meters.
struct MapPoint {
    double north = 0.0;
    double east = 0.0;
};

inline MapPoint operator+(MapPoint a, MapPoint b) { return {a.north + b.north, a.east + b.east}; }
inline MapPoint operator-(MapPoint a, MapPoint b) { return {a.north - b.north, a.east - b.east}; }

inline double distance(MapPoint a, MapPoint b) {
    return std::hypot(a.north - b.north, a.east - b.east);
}

// Heading is measured clockwise from map-north, stored normalized in (-pi, pi].
struct Heading {
    double theta = 0.0;

    Heading() = default;
    explicit Heading(double radians) : theta(normalize_angle(radians)) {}
    static Heading from_degrees(double deg) { return Heading(deg2rad(deg)); }
};

struct PixelMeasurement {
    double u = 0.0;   // image column, pixels
    double d = 0.0;   // disparity, pixels
};

// Pinhole projection of a camera-frame ground point to (column, disparity).
inline PixelMeasurement project(const CameraPoint& p, const CameraIntrinsics& cam) {
    if (!(p.x_north_cam > kEpsilonDepth))
        throw DepthTooSmall("project: x_north_cam <= epsilon_depth");
    PixelMeasurement m;
    m.u = cam.c_u + cam.f_u * p.x_east_cam / p.x_north_cam;
    m.d = cam.b_prime * cam.f_u / p.x_north_cam;
    return m;
}

inline CameraPoint unproject(double u, double d, const CameraIntrinsics& cam) {
    if (!(d > kMinDisparity))
        throw DisparityTooSmall("unproject: disparity <= d_min");
    CameraPoint p;
    p.x_north_cam = cam.b_prime * cam.f_u / d;
    p.x_east_cam = (u - cam.c_u) * p.x_north_cam / cam.f_u;
    return p;
}

// 2D rotation by a heading angle, (b_north, b_east) -> (m_north, m_east).
inline MapPoint rotate2d(Heading theta, MapPoint p) {
    const double c = std::cos(theta.theta);
    const double s = std::sin(theta.theta);
    return {c * p.north - s * p.east, s * p.north + c * p.east};
}

struct EgoPose {
    MapPoint position;
    Heading theta;
    double timestamp = 0.0;
};

// Rigid transform of a camera-frame point into the map frame given the ego
// pose: rotate by the heading, then translate by the ego position.
inline MapPoint camera_to_map(const CameraPoint& p, const EgoPose& pose) {
    const MapPoint rotated = rotate2d(pose.theta, MapPoint{p.x_north_cam, p.x_east_cam});
    return rotated + pose.position;
}

// Unit vector of travel for a heading: north = (1,0), east = (0,1).
inline MapPoint heading_forward(Heading theta) {
    return {std::cos(theta.theta), std::sin(theta.theta)};
}

// Unit vector 90 degrees clockwise of travel (to the right of the vehicle).
inline MapPoint heading_right(Heading theta) {
    return {-std::sin(theta.theta), std::cos(theta.theta)};
}

}  // namespace crosstrack
