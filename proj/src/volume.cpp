#include "xraysim/volume.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "xraysim/rng.hpp"
#include "xraysim/stats.hpp"

namespace xraysim {

const std::array<std::string, kNumLabels>& label_names() {
    static const std::array<std::string, kNumLabels> names = {
        "Background", "Ulna",     "Radius",  "Triquetrum", "Lunate",   "Scaphoid",
        "Pisiform",   "Hamate",   "Capitate", "Trapezoid",  "Trapezium",
    };
    return names;
}

void LabelVolume::check_labels() const {
    for (std::uint8_t v : data())
        if (v >= kNumLabels)
            throw Error("label value " + std::to_string(int(v)) + " outside [0, 10]");
}

CtVolume clamp_air(const CtVolume& vol) {
    CtVolume out = vol;
    for (float& v : out.data())
        v = std::max(v, 0.0f);
    return out;
}

CtVolume clamp_artifacts(const CtVolume& vol, double percentile) {
    const float cap = percentile_nearest_rank(vol.data(), percentile);
    CtVolume out = vol;
    for (float& v : out.data())
        v = std::min(v, cap);
    return out;
}

namespace {

// Continuous source index for an output voxel center, per axis: physical
// coordinate / spacing - 0.5.
double to_index(double phys, double spacing) { return phys / spacing - 0.5; }

int output_dim(double extent, double target) {
    // ceil with a relative guard: binary fuzz in extent/target must not add a
    // spurious trailing voxel (e.g. 100 * 0.29 / 0.5 -> 57.999999999999993).
    return std::max(1, int(std::ceil(extent / target - 1e-9)));
}

float sample_trilinear_clamped(const CtVolume& vol, double ux, double uy, double uz) {
    const Dims3& d = vol.dims();
    ux = std::clamp(ux, 0.0, double(d.nx - 1));
    uy = std::clamp(uy, 0.0, double(d.ny - 1));
    uz = std::clamp(uz, 0.0, double(d.nz - 1));
    const int x0 = int(ux), y0 = int(uy), z0 = int(uz);
    const int x1 = std::min(x0 + 1, d.nx - 1);
    const int y1 = std::min(y0 + 1, d.ny - 1);
    const int z1 = std::min(z0 + 1, d.nz - 1);
    const double fx = ux - x0, fy = uy - y0, fz = uz - z0;

    const double c00 = vol.at(x0, y0, z0) * (1 - fx) + vol.at(x1, y0, z0) * fx;
    const double c10 = vol.at(x0, y1, z0) * (1 - fx) + vol.at(x1, y1, z0) * fx;
    const double c01 = vol.at(x0, y0, z1) * (1 - fx) + vol.at(x1, y0, z1) * fx;
    const double c11 = vol.at(x0, y1, z1) * (1 - fx) + vol.at(x1, y1, z1) * fx;
    const double c0 = c00 * (1 - fy) + c10 * fy;
    const double c1 = c01 * (1 - fy) + c11 * fy;
    return float(c0 * (1 - fz) + c1 * fz);
}

std::uint8_t sample_nearest_clamped(const LabelVolume& vol, double ux, double uy, double uz) {
    const Dims3& d = vol.dims();
    const int x = std::clamp(int(std::lround(ux)), 0, d.nx - 1);
    const int y = std::clamp(int(std::lround(uy)), 0, d.ny - 1);
    const int z = std::clamp(int(std::lround(uz)), 0, d.nz - 1);
    return vol.at(x, y, z);
}

// Inside the volume's physical box? Index units: centers span [0, n-1], the
// box spans [-0.5, n-0.5].
bool inside_box(double u, int n) { return u >= -0.5 && u <= n - 0.5; }

struct RotationPlane {
    int a, b; // the two axes mixed by the rotation
};

RotationPlane plane_for(Axis axis) {
    switch (axis) {
        case Axis::x: return {1, 2}; // y, z
        case Axis::y: return {2, 0}; // z, x  (right-handed: +90 deg sends z toward x)
        default:      return {0, 1}; // x, y
    }
}

// Exact quarter-turn permutation. q in {1,2,3}; for odd q the in-plane dims
// and spacing must already have been checked square.
template <typename G>
G rotate_quarter(const G& vol, int q, Axis axis) {
    const Dims3& d = vol.dims();
    G out(d, vol.spacing());
    const RotationPlane pl = plane_for(axis);
    const int na = d[pl.a], nb = d[pl.b];
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                int idx[3] = {x, y, z};
                int src[3] = {x, y, z};
                const int ia = idx[pl.a], ib = idx[pl.b];
                switch (q) {
                    case 1: src[pl.a] = ib; src[pl.b] = na - 1 - ia; break;
                    case 2: src[pl.a] = na - 1 - ia; src[pl.b] = nb - 1 - ib; break;
                    default: src[pl.a] = nb - 1 - ib; src[pl.b] = ia; break;
                }
                out.at(x, y, z) = vol.at(src[0], src[1], src[2]);
            }
    return out;
}

// General path: inverse-rotate each output voxel center about the volume's
// physical center and sample the source there; 0 outside the source box.
template <typename G, typename Sampler, typename T>
G rotate_general(const G& vol, double angle_deg, Axis axis, Sampler sample, T fill) {
    const Dims3& d = vol.dims();
    const Vec3 s = vol.spacing();
    G out(d, s);
    const RotationPlane pl = plane_for(axis);
    const double rad = angle_deg * std::acos(-1.0) / 180.0;
    const double c = std::cos(rad), sn = std::sin(rad);
    const double sp[3] = {s.x, s.y, s.z};
    const int nn[3] = {d.nx, d.ny, d.nz};
    const double center[3] = {d.nx * s.x / 2.0, d.ny * s.y / 2.0, d.nz * s.z / 2.0};

    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                const int idx[3] = {x, y, z};
                double p[3];
                for (int i = 0; i < 3; ++i)
                    p[i] = (idx[i] + 0.5) * sp[i];
                const double da = p[pl.a] - center[pl.a];
                const double db = p[pl.b] - center[pl.b];
                // src = R(-angle) * d + center in the rotation plane
                double q[3] = {p[0], p[1], p[2]};
                q[pl.a] = c * da + sn * db + center[pl.a];
                q[pl.b] = -sn * da + c * db + center[pl.b];

                double u[3];
                bool inside = true;
                for (int i = 0; i < 3; ++i) {
                    u[i] = to_index(q[i], sp[i]);
                    inside = inside && inside_box(u[i], nn[i]);
                }
                out.at(x, y, z) = inside ? sample(vol, u[0], u[1], u[2]) : fill;
            }
    return out;
}

template <typename G, typename Sampler, typename T>
G rotate_impl(const G& vol, double angle_deg, Axis axis, Sampler sample, T fill) {
    if (!std::isfinite(angle_deg))
        throw Error("rotation angle must be finite");
    if (std::fmod(angle_deg, 90.0) == 0.0) {
        const long long quarters = llround(angle_deg / 90.0);
        const int q = int(((quarters % 4) + 4) % 4);
        if (q == 0)
            return vol;
        const RotationPlane pl = plane_for(axis);
        const Dims3& d = vol.dims();
        const Vec3 s = vol.spacing();
        const double sa = (pl.a == 0 ? s.x : pl.a == 1 ? s.y : s.z);
        const double sb = (pl.b == 0 ? s.x : pl.b == 1 ? s.y : s.z);
        const bool square_plane = d[pl.a] == d[pl.b] && sa == sb;
        if (q == 2 || square_plane)
            return rotate_quarter(vol, q, axis);
        // 90/270 on a non-square plane is not grid-preserving; interpolate.
    }
    return rotate_general(vol, angle_deg, axis, sample, fill);
}

} // namespace

CtVolume rotate_volume(const CtVolume& vol, double angle_deg, Axis axis) {
    return rotate_impl(vol, angle_deg, axis,
                       [](const CtVolume& v, double x, double y, double z) {
                           return sample_trilinear_clamped(v, x, y, z);
                       },
                       0.0f);
}

LabelVolume rotate_volume(const LabelVolume& vol, double angle_deg, Axis axis) {
    return rotate_impl(vol, angle_deg, axis,
                       [](const LabelVolume& v, double x, double y, double z) {
                           return sample_nearest_clamped(v, x, y, z);
                       },
                       std::uint8_t(0));
}

CtVolume resample_isotropic(const CtVolume& vol, double target_mm) {
    if (!(target_mm > 0.0))
        throw Error("resample target must be > 0");
    const Dims3& d = vol.dims();
    if (d.nx < 2 || d.ny < 2 || d.nz < 2)
        throw DegenerateVolume("resampling needs >= 2 voxels per axis");
    const Vec3 ext = vol.extent();
    const Dims3 od{output_dim(ext.x, target_mm), output_dim(ext.y, target_mm),
                   output_dim(ext.z, target_mm)};
    CtVolume out(od, {target_mm, target_mm, target_mm});
    const Vec3 s = vol.spacing();
    for (int z = 0; z < od.nz; ++z) {
        const double uz = to_index((z + 0.5) * target_mm, s.z);
        for (int y = 0; y < od.ny; ++y) {
            const double uy = to_index((y + 0.5) * target_mm, s.y);
            for (int x = 0; x < od.nx; ++x) {
                const double ux = to_index((x + 0.5) * target_mm, s.x);
                out.at(x, y, z) = sample_trilinear_clamped(vol, ux, uy, uz);
            }
        }
    }
    return out;
}

LabelVolume resample_labels(const LabelVolume& vol, double target_mm) {
    if (!(target_mm > 0.0))
        throw Error("resample target must be > 0");
    const Dims3& d = vol.dims();
    if (d.nx < 2 || d.ny < 2 || d.nz < 2)
        throw DegenerateVolume("resampling needs >= 2 voxels per axis");
    const Vec3 ext = vol.extent();
    const Dims3 od{output_dim(ext.x, target_mm), output_dim(ext.y, target_mm),
                   output_dim(ext.z, target_mm)};
    LabelVolume out(od, {target_mm, target_mm, target_mm});
    const Vec3 s = vol.spacing();
    for (int z = 0; z < od.nz; ++z) {
        const double uz = to_index((z + 0.5) * target_mm, s.z);
        for (int y = 0; y < od.ny; ++y) {
            const double uy = to_index((y + 0.5) * target_mm, s.y);
            for (int x = 0; x < od.nx; ++x) {
                const double ux = to_index((x + 0.5) * target_mm, s.x);
                out.at(x, y, z) = sample_nearest_clamped(vol, ux, uy, uz);
            }
        }
    }
    return out;
}

namespace {

bool primitive_intersects(const PhantomPrimitive& p, const Vec3& ext) {
    // Conservative bounding-box test; "entirely outside" is the error case.
    Vec3 half{};
    switch (p.shape) {
        case PhantomPrimitive::Shape::box:
            half = {p.size_mm.x / 2, p.size_mm.y / 2, p.size_mm.z / 2};
            break;
        case PhantomPrimitive::Shape::sphere:
            half = {p.size_mm.x, p.size_mm.x, p.size_mm.x};
            break;
        case PhantomPrimitive::Shape::cylinder: {
            const double r = p.size_mm.x, h = p.size_mm.y / 2;
            half = {r, r, r};
            if (p.cyl_axis == Axis::x) half.x = h;
            if (p.cyl_axis == Axis::y) half.y = h;
            if (p.cyl_axis == Axis::z) half.z = h;
            break;
        }
    }
    return p.center_mm.x + half.x > 0 && p.center_mm.x - half.x < ext.x &&
           p.center_mm.y + half.y > 0 && p.center_mm.y - half.y < ext.y &&
           p.center_mm.z + half.z > 0 && p.center_mm.z - half.z < ext.z;
}

bool inside_primitive(const PhantomPrimitive& p, double x, double y, double z) {
    const double dx = x - p.center_mm.x, dy = y - p.center_mm.y, dz = z - p.center_mm.z;
    switch (p.shape) {
        case PhantomPrimitive::Shape::box:
            return std::abs(dx) <= p.size_mm.x / 2 && std::abs(dy) <= p.size_mm.y / 2 &&
                   std::abs(dz) <= p.size_mm.z / 2;
        case PhantomPrimitive::Shape::sphere:
            return dx * dx + dy * dy + dz * dz <= p.size_mm.x * p.size_mm.x;
        case PhantomPrimitive::Shape::cylinder: {
            const double r2 = p.size_mm.x * p.size_mm.x;
            const double hh = p.size_mm.y / 2;
            switch (p.cyl_axis) {
                case Axis::x: return std::abs(dx) <= hh && dy * dy + dz * dz <= r2;
                case Axis::y: return std::abs(dy) <= hh && dx * dx + dz * dz <= r2;
                default:      return std::abs(dz) <= hh && dx * dx + dy * dy <= r2;
            }
        }
    }
    return false;
}

} // namespace

std::pair<CtVolume, LabelVolume> make_phantom(const PhantomSpec& spec, std::uint64_t seed) {
    CtVolume ct(spec.dims, spec.spacing, 0.0f);
    LabelVolume labels(spec.dims, spec.spacing, 0);
    const Vec3 ext = ct.extent();

    for (const PhantomPrimitive& p : spec.primitives) {
        if (p.label < 0 || p.label >= kNumLabels)
            throw SpecOutOfBounds("phantom primitive label outside [0, 10]");
        if (!primitive_intersects(p, ext))
            throw SpecOutOfBounds("phantom primitive lies entirely outside the volume");
        for (int z = 0; z < spec.dims.nz; ++z) {
            const double pz = (z + 0.5) * spec.spacing.z;
            for (int y = 0; y < spec.dims.ny; ++y) {
                const double py = (y + 0.5) * spec.spacing.y;
                for (int x = 0; x < spec.dims.nx; ++x) {
                    const double px = (x + 0.5) * spec.spacing.x;
                    if (inside_primitive(p, px, py, pz)) {
                        ct.at(x, y, z) = p.intensity;
                        labels.at(x, y, z) = std::uint8_t(p.label);
                    }
                }
            }
        }
    }

    if (spec.noise_sigma > 0.0) {
        SplitMix64 rng(seed);
        auto& data = ct.data();
        // Box-Muller; <random>'s normal_distribution is not portable bitwise.
        for (std::size_t i = 0; i < data.size(); i += 2) {
            const double u1 = std::max(rng.next_unit(), 1e-300);
            const double u2 = rng.next_unit();
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double two_pi = 2.0 * std::acos(-1.0);
            data[i] += float(spec.noise_sigma * r * std::cos(two_pi * u2));
            if (i + 1 < data.size())
                data[i + 1] += float(spec.noise_sigma * r * std::sin(two_pi * u2));
        }
    }
    return {std::move(ct), std::move(labels)};
}

namespace {

Axis axis_from_string(const std::string& s) {
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    if (s == "z") return Axis::z;
    throw ConfigError("unknown axis '" + s + "'");
}

} // namespace

PhantomSpec parse_phantom_spec(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("phantom spec: ") + e.what());
    }
    PhantomSpec spec;
    try {
        const auto& dims = j.at("dims");
        spec.dims = {dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>()};
        const auto& sp = j.at("spacing_mm");
        spec.spacing = {sp.at(0).get<double>(), sp.at(1).get<double>(), sp.at(2).get<double>()};
        spec.noise_sigma = j.value("noise_sigma", 0.0);
        for (const auto& jp : j.value("primitives", nlohmann::json::array())) {
            PhantomPrimitive p;
            const std::string shape = jp.at("shape").get<std::string>();
            if (shape == "box") p.shape = PhantomPrimitive::Shape::box;
            else if (shape == "sphere") p.shape = PhantomPrimitive::Shape::sphere;
            else if (shape == "cylinder") p.shape = PhantomPrimitive::Shape::cylinder;
            else throw ConfigError("unknown primitive shape '" + shape + "'");
            const auto& c = jp.at("center_mm");
            p.center_mm = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
            const auto& s = jp.at("size_mm");
            if (s.empty())
                throw ConfigError("primitive size_mm must not be empty");
            p.size_mm = {s.at(0).get<double>(),
                         s.size() > 1 ? s.at(1).get<double>() : 0.0,
                         s.size() > 2 ? s.at(2).get<double>() : 0.0};
            if (jp.contains("axis"))
                p.cyl_axis = axis_from_string(jp.at("axis").get<std::string>());
            p.intensity = jp.at("intensity").get<float>();
            p.label = jp.at("label").get<int>();
            spec.primitives.push_back(p);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("phantom spec: ") + e.what());
    }
    return spec;
}

PhantomSpec load_phantom_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open phantom spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_phantom_spec(ss.str());
}

} // namespace xraysim
