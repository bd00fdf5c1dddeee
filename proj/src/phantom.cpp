#include "ivt/phantom.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

namespace ivt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// C^1 ramp: 0 for t <= 0, 1 for t >= 1, cosine blend between.
double ramp(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return 0.5 * (1.0 - std::cos(kPi * t));
}

double feature_value(const Feature& f, double x, double y) {
    const double d = std::hypot(x - f.cx, y - f.cy);
    if (f.kind == Feature::Kind::Disk) {
        return f.amplitude * ramp((f.radius - d) / f.smoothing_width);
    }
    const double inner = f.radius - f.thickness;
    return f.amplitude * (ramp((f.radius - d) / f.smoothing_width) -
                          ramp((inner - d) / f.smoothing_width));
}

void validate(const PhantomSpec& spec) {
    for (const auto& f : spec.features) {
        if (f.smoothing_width <= 0.0) throw ConfigError("phantom: smoothing_width must be > 0");
        if (f.radius <= 0.0) throw ConfigError("phantom: feature radius must be > 0");
        if (f.kind == Feature::Kind::Annulus && (f.thickness <= 0.0 || f.thickness >= f.radius))
            throw ConfigError("phantom: annulus thickness must be in (0, radius)");
        const double extent = std::hypot(f.cx, f.cy) + f.radius;
        if (extent >= spec.support_radius)
            throw ConfigError("phantom: feature extends beyond the support radius");
    }
}

}  // namespace

double phantom_value(const PhantomSpec& spec, double x, double y) {
    double v = 0.0;
    for (const auto& f : spec.features) v += feature_value(f, x, y);
    return v;
}

ImageGrid make_phantom(const PhantomSpec& spec, int n, double half_width) {
    validate(spec);
    ImageGrid img(n, half_width);
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < n; ++iy) {
        const double y = img.coord(iy);
        for (int ix = 0; ix < n; ++ix) img.at(ix, iy) = phantom_value(spec, img.coord(ix), y);
    }
    return img;
}

PolarSamples cartesian_to_polar(const ImageGrid& img, int n_r, int n_theta, double r_max) {
    if (n_r < 4 || n_theta < 4) throw ConfigError("cartesian_to_polar: need n_r, n_theta >= 4");
    PolarSamples p;
    p.n_r = n_r;
    p.n_theta = n_theta;
    p.r_max = r_max;
    p.values.resize(static_cast<size_t>(n_r) * n_theta);
    const double dr = r_max / (n_r - 1);
    const double dth = 2.0 * kPi / n_theta;
    for (int i = 0; i < n_r; ++i) {
        const double r = i * dr;
        for (int j = 0; j < n_theta; ++j) {
            const double th = j * dth;
            p.values[static_cast<size_t>(i) * n_theta + j] = img.sample(r * std::cos(th), r * std::sin(th));
        }
    }
    return p;
}

ImageGrid polar_to_cartesian(const PolarSamples& polar, int n, double half_width) {
    ImageGrid img(n, half_width);
    const double dr = polar.r_max / (polar.n_r - 1);
    const double dth = 2.0 * kPi / polar.n_theta;
    for (int iy = 0; iy < n; ++iy) {
        const double y = img.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = img.coord(ix);
            const double r = std::hypot(x, y);
            if (r > polar.r_max) continue;
            double th = std::atan2(y, x);
            if (th < 0.0) th += 2.0 * kPi;
            const double fr = r / dr;
            const double ft = th / dth;
            const int ir = std::min(static_cast<int>(fr), polar.n_r - 2);
            const int it = static_cast<int>(ft) % polar.n_theta;
            const int it1 = (it + 1) % polar.n_theta;
            const double wr = fr - ir;
            const double wt = ft - static_cast<int>(ft);
            auto val = [&](int i, int j) { return polar.values[static_cast<size_t>(i) * polar.n_theta + j]; };
            img.at(ix, iy) = (1.0 - wr) * ((1.0 - wt) * val(ir, it) + wt * val(ir, it1)) +
                             wr * ((1.0 - wt) * val(ir + 1, it) + wt * val(ir + 1, it1));
        }
    }
    return img;
}

std::vector<double> add_noise(const std::vector<double>& data, double level, uint64_t seed) {
    if (level < 0.0) throw ConfigError("add_noise: level must be >= 0");
    if (level == 0.0) return data;
    std::vector<double> noise(data.size());
    std::mt19937_64 rng(seed);
    // explicit Box-Muller so the stream does not depend on the standard
    // library's normal_distribution internals
    auto uniform = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    };
    for (size_t i = 0; i + 1 < noise.size(); i += 2) {
        const double u1 = uniform(), u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        noise[i] = m * std::cos(2.0 * kPi * u2);
        noise[i + 1] = m * std::sin(2.0 * kPi * u2);
    }
    if (noise.size() % 2 == 1) {
        const double u1 = uniform(), u2 = uniform();
        noise.back() = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
    double norm_data = 0.0, norm_noise = 0.0;
    for (double v : data) norm_data += v * v;
    for (double v : noise) norm_noise += v * v;
    if (norm_noise == 0.0) return data;
    const double scale = level * std::sqrt(norm_data / norm_noise);
    std::vector<double> out(data.size());
    for (size_t i = 0; i < data.size(); ++i) out[i] = data[i] + scale * noise[i];
    return out;
}

Metrics compare(const ImageGrid& rec, const ImageGrid& truth) {
    ImageGrid ones(truth.n, truth.half_width);
    for (auto& v : ones.values) v = 1.0;
    return compare_masked(rec, truth, ones);
}

Metrics compare_masked(const ImageGrid& rec, const ImageGrid& truth, const ImageGrid& mask) {
    if (rec.n != truth.n || rec.half_width != truth.half_width)
        throw ConfigError("compare: grids must match");
    double nt = 0.0, diff2 = 0.0, linf = 0.0;
    double sa = 0.0, sb = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < truth.values.size(); ++i) {
        if (mask.values[i] == 0.0) continue;
        ++count;
        const double a = rec.values[i], b = truth.values[i];
        nt += b * b;
        const double d = a - b;
        diff2 += d * d;
        linf = std::max(linf, std::abs(d));
        sa += a;
        sb += b;
    }
    if (nt == 0.0 || count == 0) throw NumericError("compare: truth norm is zero, metrics undefined");
    const double ma = sa / count, mb = sb / count;
    double cab = 0.0, caa = 0.0, cbb = 0.0;
    for (size_t i = 0; i < truth.values.size(); ++i) {
        if (mask.values[i] == 0.0) continue;
        const double a = rec.values[i] - ma, b = truth.values[i] - mb;
        cab += a * b;
        caa += a * a;
        cbb += b * b;
    }
    Metrics m;
    m.rel_l2 = std::sqrt(diff2 / nt);
    m.linf = linf;
    if (caa <= 0.0 || cbb <= 0.0)
        m.ncc = (diff2 == 0.0) ? 1.0 : 0.0;
    else
        m.ncc = cab / std::sqrt(caa * cbb);
    return m;
}

PhantomSpec phantom_preset(const std::string& name) {
    PhantomSpec spec;
    spec.support_radius = 1.5;
    auto disk = [](double cx, double cy, double r, double amp, double w) {
        Feature f;
        f.kind = Feature::Kind::Disk;
        f.cx = cx;
        f.cy = cy;
        f.radius = r;
        f.amplitude = amp;
        f.smoothing_width = w;
        return f;
    };
    auto annulus = [](double r_outer, double thick, double amp, double w) {
        Feature f;
        f.kind = Feature::Kind::Annulus;
        f.radius = r_outer;
        f.thickness = thick;
        f.amplitude = amp;
        f.smoothing_width = w;
        return f;
    };
    if (name == "interior") {
        spec.features = {
            disk(0.14, 0.10, 0.13, 1.0, 0.03),
            disk(-0.17, 0.11, 0.10, 1.0, 0.03),
            disk(0.00, -0.19, 0.14, 1.0, 0.03),
        };
        return spec;
    }
    if (name == "ext-int") {
        spec = phantom_preset("interior");
        spec.features.push_back(annulus(1.00, 0.10, 1.0, 0.03));
        spec.features.push_back(annulus(1.32, 0.10, 1.0, 0.03));
        return spec;
    }
    if (name == "ext-invisible") {
        spec = phantom_preset("ext-int");
        const double rho = 1.12, rr = 0.07;
        for (double ang : {0.35, 1.85, 3.35, 4.85})
            spec.features.push_back(disk(rho * std::cos(ang), rho * std::sin(ang), rr, 1.0, 0.03));
        return spec;
    }
    throw ConfigError("unknown phantom preset: " + name);
}

PhantomSpec phantom_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    PhantomSpec spec;
    spec.support_radius = j.value("support_radius", 1.5);
    for (const auto& jf : j.at("features")) {
        Feature f;
        const std::string kind = jf.value("kind", "disk");
        if (kind == "disk")
            f.kind = Feature::Kind::Disk;
        else if (kind == "annulus")
            f.kind = Feature::Kind::Annulus;
        else
            throw ConfigError("phantom_from_json: unknown feature kind " + kind);
        if (jf.contains("center")) {
            f.cx = jf["center"].at(0).get<double>();
            f.cy = jf["center"].at(1).get<double>();
        }
        f.radius = jf.at("radius").get<double>();
        f.thickness = jf.value("thickness", 0.0);
        f.amplitude = jf.value("amplitude", 1.0);
        f.smoothing_width = jf.value("smoothing_width", 0.02);
        spec.features.push_back(f);
    }
    validate(spec);
    return spec;
}

}  // namespace ivt
