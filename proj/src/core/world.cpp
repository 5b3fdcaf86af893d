#include "world.hpp"

#include <algorithm>
#include <cmath>

namespace mfv::world {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaxArmAngle = kPi / 3.0;

// trousers and product backdrop are fixed, dyadic constants
const Rgb kTrouserColor = {56.0 / 256.0, 56.0 / 256.0, 64.0 / 256.0};
constexpr double kProductBackdrop = 240.0 / 256.0;

struct Vec2 {
    double x, y;
};

double dist_point_segment(double px, double py, Vec2 a, Vec2 b) {
    double vx = b.x - a.x, vy = b.y - a.y;
    double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

// Body geometry derived from PersonSpec; units are pixels of the given canvas.
struct Geometry {
    double cx;
    double head_cy, head_r;
    double torso_y0, torso_y1;   // top/bottom of torso polygon
    double half_top, half_bot;   // torso half widths
    Vec2 shoulder_l, shoulder_r;
    Vec2 hand_l, hand_r;
    double arm_r, sleeve_r, hand_rad;
    double leg_y1, leg_half, leg_gap;

    Geometry(const WorldConfig& wc, const PersonSpec& p) {
        double H = wc.height, W = wc.width;
        uint64_t j = mix_seed(static_cast<uint64_t>(p.body_seed), 0x626f6479);
        cx = W / 2.0 + (static_cast<double>(j % 3) - 1.0);
        head_r = (0.082 + 0.008 * static_cast<double>((j >> 8) % 3)) * H;
        head_cy = 0.155 * H;
        torso_y0 = head_cy + head_r + 1.0;
        torso_y1 = 0.70 * H;
        half_top = 0.19 * W * p.torso_scale;
        half_bot = 0.25 * W * p.torso_scale;
        double sy = torso_y0 + 1.5;
        shoulder_l = {cx - half_top, sy};
        shoulder_r = {cx + half_top, sy};
        double arm_len = 0.28 * H;
        hand_l = {shoulder_l.x - arm_len * std::sin(p.arm_angles[0]),
                  shoulder_l.y + arm_len * std::cos(p.arm_angles[0])};
        hand_r = {shoulder_r.x + arm_len * std::sin(p.arm_angles[1]),
                  shoulder_r.y + arm_len * std::cos(p.arm_angles[1])};
        arm_r = 0.052 * W;
        sleeve_r = arm_r + 1.0;
        hand_rad = arm_r * 0.9;
        leg_y1 = 0.92 * H;
        leg_half = 0.30 * half_bot;
        leg_gap = 0.38 * half_bot;
    }

    double torso_half(double y) const {
        double t = (y - torso_y0) / (torso_y1 - torso_y0);
        return half_top + (half_bot - half_top) * t;
    }

    bool in_torso(double x, double y) const {
        if (y < torso_y0 || y > torso_y1) return false;
        return std::fabs(x - cx) <= torso_half(y);
    }
    bool in_head(double x, double y) const {
        double dx = x - cx, dy = y - head_cy;
        return dx * dx + dy * dy <= head_r * head_r;
    }
    bool in_hair(double x, double y) const {
        return in_head(x, y) && y <= head_cy - 0.25 * head_r;
    }
    bool in_arm(double x, double y) const {
        return dist_point_segment(x, y, shoulder_l, hand_l) <= arm_r ||
               dist_point_segment(x, y, shoulder_r, hand_r) <= arm_r;
    }
    bool in_sleeve(double x, double y) const {
        return dist_point_segment(x, y, shoulder_l, hand_l) <= sleeve_r ||
               dist_point_segment(x, y, shoulder_r, hand_r) <= sleeve_r;
    }
    bool in_hand(double x, double y) const {
        double dxl = x - hand_l.x, dyl = y - hand_l.y;
        double dxr = x - hand_r.x, dyr = y - hand_r.y;
        return dxl * dxl + dyl * dyl <= hand_rad * hand_rad ||
               dxr * dxr + dyr * dyr <= hand_rad * hand_rad;
    }
    bool in_leg(double x, double y) const {
        if (y <= torso_y1 || y > leg_y1) return false;
        double d = std::fabs(x - cx);
        return d >= leg_gap - leg_half && d <= leg_gap + leg_half;
    }
};

enum class Label : uint8_t { background, leg, arm, garment, hand, head, hair };

// Pattern color lookup in the garment's local frame. bx0/by0 anchor the
// frame at the torso bounding box so patterns stay put under sleeve changes.
struct PatternPainter {
    const GarmentSpec& g;
    int bx0, by0, bw, bh;

    Rgb color_at(int x, int y) const {
        int u = x - bx0, v = y - by0;
        int p = g.pattern_period;
        bool use_pattern = false;
        switch (g.pattern) {
            case Pattern::solid:
                break;
            case Pattern::stripes: {
                int band = std::max(1, p / 2);
                use_pattern = ((u % p) + p) % p >= band;
                break;
            }
            case Pattern::checker: {
                int cell = std::max(1, p / 2);
                int iu = u >= 0 ? u / cell : (u - cell + 1) / cell;
                int iv = v >= 0 ? v / cell : (v - cell + 1) / cell;
                use_pattern = ((iu + iv) % 2 + 2) % 2 == 1;
                break;
            }
            case Pattern::dots: {
                int du = ((u % p) + p) % p - p / 2;
                int dv = ((v % p) + p) % p - p / 2;
                int r = std::max(1, p / 3);
                use_pattern = du * du + dv * dv <= r * r;
                break;
            }
        }
        if (logo_at(u, v)) use_pattern = !use_pattern;  // logo inverts locally, always visible
        return use_pattern ? g.pattern_color : g.base_color;
    }

    bool logo_at(int u, int v) const {
        static const uint8_t glyphs[8][7] = {
            {0x0e, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11},  // A
            {0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f},  // E
            {0x11, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11},  // H
            {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11},  // K
            {0x0e, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e},  // O
            {0x0f, 0x10, 0x10, 0x0e, 0x01, 0x01, 0x1e},  // S
            {0x1f, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04},  // T
            {0x11, 0x11, 0x0a, 0x04, 0x0a, 0x11, 0x11},  // X
        };
        constexpr int scale = 2;
        constexpr int gw = 5 * scale, gh = 7 * scale;
        int lx0 = static_cast<int>(std::lround(g.logo_pos[0] * (bw - gw)));
        int ly0 = static_cast<int>(std::lround(g.logo_pos[1] * (bh - gh)));
        int lu = u - lx0, lv = v - ly0;
        if (lu < 0 || lu >= gw || lv < 0 || lv >= gh) return false;
        return (glyphs[g.logo_glyph][lv / scale] >> (4 - lu / scale)) & 1;
    }
};

void validate_rgb(const Rgb& c, const char* what) {
    for (double v : c)
        require(v >= 0.0 && v <= 1.0, ErrCategory::usage,
                std::string(what) + ": channel out of [0,1]");
}

}  // namespace

void PersonSpec::validate() const {
    validate_rgb(skin_tone, "PersonSpec.skin_tone");
    validate_rgb(hair_color, "PersonSpec.hair_color");
    for (double a : arm_angles)
        require(a >= -kMaxArmAngle - 1e-12 && a <= kMaxArmAngle + 1e-12, ErrCategory::usage,
                "PersonSpec.arm_angles out of [-pi/3, pi/3]");
    require(torso_scale >= 0.8 && torso_scale <= 1.2, ErrCategory::usage,
            "PersonSpec.torso_scale out of [0.8, 1.2]");
}

void GarmentSpec::validate() const {
    validate_rgb(base_color, "GarmentSpec.base_color");
    validate_rgb(pattern_color, "GarmentSpec.pattern_color");
    require(pattern_period >= 2, ErrCategory::usage, "GarmentSpec.pattern_period must be >= 2");
    require(logo_glyph >= 0 && logo_glyph < 8, ErrCategory::usage,
            "GarmentSpec.logo_glyph must be in 0..7");
    for (double v : logo_pos)
        require(v >= 0.1 && v <= 0.9, ErrCategory::usage,
                "GarmentSpec.logo_pos out of [0.1, 0.9]");
}

void BackgroundSpec::validate() const {
    for (const auto& c : palette) validate_rgb(c, "BackgroundSpec.palette");
}

Image render_background(const WorldConfig& wc, const BackgroundSpec& bg) {
    bg.validate();
    int H = wc.height, W = wc.width;
    if (bg.kind == BackgroundKind::studio_blank) {
        double gray = quantize_level(wc.studio_gray);
        return Image(H, W, {gray, gray, gray});
    }
    // procedural scene: vertical gradient between palette[0] and palette[1],
    // a floor band, and a few seeded rectangles in palette[2]
    Image img(H, W);
    Prng rng(mix_seed(static_cast<uint64_t>(bg.scene_seed), 0x62616b67));
    double floor_y = (0.72 + 0.1 * rng.uniform()) * H;
    for (int y = 0; y < H; ++y) {
        double t = static_cast<double>(y) / (H - 1);
        for (int x = 0; x < W; ++x) {
            Rgb c;
            if (y >= floor_y) {
                c = {bg.palette[1][0] * 0.55, bg.palette[1][1] * 0.55, bg.palette[1][2] * 0.55};
            } else {
                for (int k = 0; k < 3; ++k) {
                    auto kk = static_cast<size_t>(k);
                    c[kk] = bg.palette[0][kk] + (bg.palette[1][kk] - bg.palette[0][kk]) * t;
                }
            }
            img.set(y, x, quantize_rgb(c));
        }
    }
    int n_shapes = 3 + static_cast<int>(rng.below(4));
    for (int s = 0; s < n_shapes; ++s) {
        int rw = 4 + static_cast<int>(rng.below(static_cast<uint64_t>(W / 3)));
        int rh = 4 + static_cast<int>(rng.below(static_cast<uint64_t>(H / 3)));
        int rx = static_cast<int>(rng.below(static_cast<uint64_t>(std::max(1, W - rw))));
        int ry = static_cast<int>(rng.below(static_cast<uint64_t>(std::max(1, H - rh))));
        double shade = 0.6 + 0.6 * rng.uniform();
        Rgb c = quantize_rgb({std::min(1.0, bg.palette[2][0] * shade),
                              std::min(1.0, bg.palette[2][1] * shade),
                              std::min(1.0, bg.palette[2][2] * shade)});
        for (int y = ry; y < ry + rh && y < H; ++y)
            for (int x = rx; x < rx + rw && x < W; ++x) img.set(y, x, c);
    }
    return img;
}

SceneRender render_scene(const WorldConfig& wc, const PersonSpec& p, const GarmentSpec& g,
                         const BackgroundSpec& bg) {
    p.validate();
    g.validate();
    Geometry geo(wc, p);
    require(geo.cx + geo.half_bot < wc.width - 1 && geo.cx - geo.half_bot > 0 &&
                geo.torso_y1 < wc.height - 1,
            ErrCategory::usage, "torso polygon must lie strictly inside the canvas");

    SceneRender out;
    out.person = p;
    out.garment = g;
    out.background = bg;
    out.image = render_background(wc, bg);
    out.garment_mask = Mask(wc.height, wc.width);
    out.background_mask = Mask(wc.height, wc.width);

    PatternPainter painter{g,
                           static_cast<int>(std::floor(geo.cx - geo.half_bot)),
                           static_cast<int>(std::floor(geo.torso_y0)),
                           static_cast<int>(std::ceil(2.0 * geo.half_bot)),
                           static_cast<int>(std::ceil(geo.torso_y1 - geo.torso_y0))};

    Rgb skin = quantize_rgb(p.skin_tone);
    Rgb hair = quantize_rgb(p.hair_color);
    Rgb trouser = quantize_rgb(kTrouserColor);

    for (int y = 0; y < wc.height; ++y) {
        for (int x = 0; x < wc.width; ++x) {
            double px = x + 0.5, py = y + 0.5;
            Label lab = Label::background;
            if (geo.in_hair(px, py)) lab = Label::hair;
            else if (geo.in_head(px, py)) lab = Label::head;
            else if (geo.in_hand(px, py)) lab = Label::hand;
            else if (geo.in_torso(px, py) ||
                     (g.sleeve == Sleeve::long_ && geo.in_sleeve(px, py))) lab = Label::garment;
            else if (geo.in_arm(px, py)) lab = Label::arm;
            else if (geo.in_leg(px, py)) lab = Label::leg;

            switch (lab) {
                case Label::background: out.background_mask.at(y, x) = 1; break;
                case Label::leg: out.image.set(y, x, trouser); break;
                case Label::arm: out.image.set(y, x, skin); break;
                case Label::garment:
                    out.image.set(y, x, quantize_rgb(painter.color_at(x, y)));
                    out.garment_mask.at(y, x) = 1;
                    break;
                case Label::hand: out.image.set(y, x, skin); break;
                case Label::head: out.image.set(y, x, skin); break;
                case Label::hair: out.image.set(y, x, hair); break;
            }
        }
    }
    out.pose_map = render_pose_map(wc, p);
    return out;
}

Mask agnostic_mask(const WorldConfig& wc, const PersonSpec& p) {
    p.validate();
    Geometry geo(wc, p);
    Mask m(wc.height, wc.width);
    for (int y = 0; y < wc.height; ++y)
        for (int x = 0; x < wc.width; ++x) {
            double px = x + 0.5, py = y + 0.5;
            if (geo.in_torso(px, py) || geo.in_sleeve(px, py)) m.at(y, x) = 1;
        }
    return m;
}

namespace {

void draw_line(Image& img, Vec2 a, Vec2 b, const Rgb& color) {
    int x0 = static_cast<int>(std::lround(a.x)), y0 = static_cast<int>(std::lround(a.y));
    int x1 = static_cast<int>(std::lround(b.x)), y1 = static_cast<int>(std::lround(b.y));
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (x0 >= 0 && x0 < img.w && y0 >= 0 && y0 < img.h) img.set(y0, x0, color);
        if (x0 == x1 && y0 == y1) break;
        int e2 = 2 * err;
        if (e2 >= dy) { err += dy; x0 += sx; }
        if (e2 <= dx) { err += dx; y0 += sy; }
    }
}

}  // namespace

Image render_pose_map(const WorldConfig& wc, const PersonSpec& p) {
    p.validate();
    Geometry geo(wc, p);
    Image img(wc.height, wc.width);  // black
    Rgb white = quantize_rgb({1.0, 1.0, 1.0});
    Vec2 head = {geo.cx, geo.head_cy};
    Vec2 hip = {geo.cx, geo.torso_y1};
    draw_line(img, head, hip, white);
    draw_line(img, geo.shoulder_l, geo.shoulder_r, white);
    draw_line(img, geo.shoulder_l, geo.hand_l, white);
    draw_line(img, geo.shoulder_r, geo.hand_r, white);
    draw_line(img, hip, {geo.cx - geo.leg_gap, geo.leg_y1}, white);
    draw_line(img, hip, {geo.cx + geo.leg_gap, geo.leg_y1}, white);
    return img;
}

Image mask_fill(const Image& img, const Mask& m, double fill) {
    require(m.h == img.h && m.w == img.w, ErrCategory::usage, "mask_fill: shape mismatch");
    require(m.is_binary(), ErrCategory::usage, "mask_fill: mask must be binary");
    Image out = img;
    double f = quantize_level(fill);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            if (m.at(y, x)) out.set(y, x, {f, f, f});
    return out;
}

Image render_garment_product(const WorldConfig& wc, const GarmentSpec& g) {
    g.validate();
    int H = wc.height, W = wc.width;
    Image img(H, W, {kProductBackdrop, kProductBackdrop, kProductBackdrop});

    double cx = W / 2.0;
    double y0 = 0.24 * H, y1 = 0.76 * H;
    double half_top = 0.20 * W, half_bot = 0.24 * W;
    double sy = y0 + 2.0;
    double sleeve_len = g.sleeve == Sleeve::long_ ? 0.26 * W : 0.10 * W;
    double sleeve_r = 0.052 * W + 1.0;
    Vec2 sl = {cx - half_top, sy}, sle = {cx - half_top - sleeve_len, sy + 0.12 * H};
    Vec2 sr = {cx + half_top, sy}, sre = {cx + half_top + sleeve_len, sy + 0.12 * H};

    PatternPainter painter{g, static_cast<int>(std::floor(cx - half_bot)),
                           static_cast<int>(std::floor(y0)),
                           static_cast<int>(std::ceil(2.0 * half_bot)),
                           static_cast<int>(std::ceil(y1 - y0))};

    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double px = x + 0.5, py = y + 0.5;
            bool in_torso = py >= y0 && py <= y1 &&
                            std::fabs(px - cx) <=
                                half_top + (half_bot - half_top) * (py - y0) / (y1 - y0);
            bool in_sleeve = dist_point_segment(px, py, sl, sle) <= sleeve_r ||
                             dist_point_segment(px, py, sr, sre) <= sleeve_r;
            if (in_torso || in_sleeve) img.set(y, x, quantize_rgb(painter.color_at(x, y)));
        }
    return img;
}

int hue_bucket(const Rgb& color) {
    Rgb c = quantize_rgb(color);
    double M = std::max({c[0], c[1], c[2]});
    double m = std::min({c[0], c[1], c[2]});
    double delta = M - m;
    double h = 0.0;
    if (delta > 0) {
        if (M == c[0]) h = 60.0 * std::fmod((c[1] - c[2]) / delta, 6.0);
        else if (M == c[1]) h = 60.0 * ((c[2] - c[0]) / delta + 2.0);
        else h = 60.0 * ((c[0] - c[1]) / delta + 4.0);
        if (h < 0) h += 360.0;
    }
    int b = static_cast<int>(h / 45.0);
    return std::clamp(b, 0, 7);
}

namespace {

int pos_bucket(const std::array<double, 2>& uv) {
    auto bucket1 = [](double v) {
        int b = static_cast<int>((v - 0.1) / 0.8 * 3.0);
        return std::clamp(b, 0, 2);
    };
    return bucket1(uv[1]) * 3 + bucket1(uv[0]);
}

}  // namespace

std::vector<int> prompt_tokens(const GarmentSpec& g, PromptMode mode) {
    g.validate();
    return {
        static_cast<int>(mode),
        2 + static_cast<int>(g.sleeve),
        4 + hue_bucket(g.base_color),
        12 + static_cast<int>(g.pattern),
        16 + g.logo_glyph,
        24 + pos_bucket(g.logo_pos),
    };
}

Mask dilate_cross(const Mask& m, int rounds) {
    Mask cur = m;
    for (int r = 0; r < rounds; ++r) {
        Mask next = cur;
        for (int y = 0; y < m.h; ++y)
            for (int x = 0; x < m.w; ++x) {
                if (cur.at(y, x)) continue;
                bool on = (y > 0 && cur.at(y - 1, x)) || (y < m.h - 1 && cur.at(y + 1, x)) ||
                          (x > 0 && cur.at(y, x - 1)) || (x < m.w - 1 && cur.at(y, x + 1));
                if (on) next.at(y, x) = 1;
            }
        cur = std::move(next);
    }
    return cur;
}

Mask erode_cross(const Mask& m, int rounds) {
    Mask cur = m;
    for (int r = 0; r < rounds; ++r) {
        Mask next = cur;
        for (int y = 0; y < m.h; ++y)
            for (int x = 0; x < m.w; ++x) {
                if (!cur.at(y, x)) continue;
                bool off = y == 0 || y == m.h - 1 || x == 0 || x == m.w - 1 ||
                           !cur.at(y - 1, x) || !cur.at(y + 1, x) || !cur.at(y, x - 1) ||
                           !cur.at(y, x + 1);
                if (off) next.at(y, x) = 0;
            }
        cur = std::move(next);
    }
    return cur;
}

Mask corrupt_mask(const Mask& m, CorruptMode mode, int magnitude, uint64_t seed) {
    require(m.is_binary(), ErrCategory::usage, "corrupt_mask: mask must be binary");
    require(magnitude >= 0, ErrCategory::usage, "corrupt_mask: magnitude must be >= 0");
    require(magnitude <= std::min(m.h, m.w) / 4, ErrCategory::usage,
            "corrupt_mask: magnitude must be <= min(H,W)/4");
    if (mode == CorruptMode::overmask) return dilate_cross(m, magnitude);

    Mask cur = erode_cross(m, magnitude);
    Prng rng(mix_seed(seed, 0x6c65616b));
    for (int k = 0; k < magnitude; ++k) {
        int64_t n_on = cur.count();
        if (n_on == 0) break;
        int64_t pick = static_cast<int64_t>(rng.below(static_cast<uint64_t>(n_on)));
        int cy = -1, cx = -1;
        for (int y = 0; y < cur.h && cy < 0; ++y)
            for (int x = 0; x < cur.w; ++x)
                if (cur.at(y, x) && pick-- == 0) {
                    cy = y;
                    cx = x;
                    break;
                }
        for (int y = std::max(0, cy - 2); y <= std::min(cur.h - 1, cy + 2); ++y)
            for (int x = std::max(0, cx - 2); x <= std::min(cur.w - 1, cx + 2); ++x)
                if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= 4) cur.at(y, x) = 0;
    }
    return cur;
}

PersonSpec sample_person(Prng& rng) {
    PersonSpec p;
    p.body_seed = static_cast<int64_t>(rng.next_u64() & 0x7fffffff);
    double tone = rng.uniform(0.35, 0.85);
    p.skin_tone = {tone, tone * rng.uniform(0.72, 0.85), tone * rng.uniform(0.5, 0.68)};
    double hv = rng.uniform(0.05, 0.75);
    p.hair_color = {hv, hv * rng.uniform(0.5, 0.9), hv * rng.uniform(0.2, 0.6)};
    p.arm_angles = {rng.uniform(-kMaxArmAngle, kMaxArmAngle),
                    rng.uniform(-kMaxArmAngle, kMaxArmAngle)};
    p.torso_scale = rng.uniform(0.8, 1.2);
    return p;
}

GarmentSpec sample_garment(Prng& rng) {
    GarmentSpec g;
    g.base_color = hsv_to_rgb(rng.uniform(0.0, 360.0), rng.uniform(0.55, 0.95),
                              rng.uniform(0.45, 0.95));
    g.pattern = static_cast<Pattern>(rng.below(4));
    g.pattern_color = hsv_to_rgb(rng.uniform(0.0, 360.0), rng.uniform(0.2, 0.8),
                                 rng.uniform(0.55, 1.0));
    g.pattern_period = rng.range_int(4, 8);
    g.logo_glyph = static_cast<int>(rng.below(8));
    g.logo_pos = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    g.sleeve = rng.coin(0.5) ? Sleeve::long_ : Sleeve::short_;
    return g;
}

BackgroundSpec sample_background(Prng& rng, BackgroundKind kind) {
    BackgroundSpec b;
    b.kind = kind;
    b.scene_seed = static_cast<int64_t>(rng.next_u64() & 0x7fffffff);
    for (auto& c : b.palette)
        c = hsv_to_rgb(rng.uniform(0.0, 360.0), rng.uniform(0.15, 0.6), rng.uniform(0.35, 0.9));
    return b;
}

Rgb hsv_to_rgb(double h_deg, double s, double v) {
    double c = v * s;
    double hp = std::fmod(h_deg, 360.0) / 60.0;
    double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    double m = v - c;
    return {r + m, g + m, b + m};
}

nlohmann::json to_json(const PersonSpec& p) {
    return {{"body_seed", p.body_seed},
            {"skin_tone", p.skin_tone},
            {"hair_color", p.hair_color},
            {"arm_angles", p.arm_angles},
            {"torso_scale", p.torso_scale}};
}

nlohmann::json to_json(const GarmentSpec& g) {
    return {{"base_color", g.base_color},
            {"pattern", static_cast<int>(g.pattern)},
            {"pattern_color", g.pattern_color},
            {"pattern_period", g.pattern_period},
            {"logo_glyph", g.logo_glyph},
            {"logo_pos", g.logo_pos},
            {"sleeve", static_cast<int>(g.sleeve)}};
}

nlohmann::json to_json(const BackgroundSpec& b) {
    return {{"kind", static_cast<int>(b.kind)},
            {"scene_seed", b.scene_seed},
            {"palette", b.palette}};
}

PersonSpec person_from_json(const nlohmann::json& j) {
    PersonSpec p;
    p.body_seed = j.at("body_seed").get<int64_t>();
    p.skin_tone = j.at("skin_tone").get<Rgb>();
    p.hair_color = j.at("hair_color").get<Rgb>();
    p.arm_angles = j.at("arm_angles").get<std::array<double, 2>>();
    p.torso_scale = j.at("torso_scale").get<double>();
    p.validate();
    return p;
}

GarmentSpec garment_from_json(const nlohmann::json& j) {
    GarmentSpec g;
    g.base_color = j.at("base_color").get<Rgb>();
    g.pattern = static_cast<Pattern>(j.at("pattern").get<int>());
    g.pattern_color = j.at("pattern_color").get<Rgb>();
    g.pattern_period = j.at("pattern_period").get<int>();
    g.logo_glyph = j.at("logo_glyph").get<int>();
    g.logo_pos = j.at("logo_pos").get<std::array<double, 2>>();
    g.sleeve = static_cast<Sleeve>(j.at("sleeve").get<int>());
    g.validate();
    return g;
}

BackgroundSpec background_from_json(const nlohmann::json& j) {
    BackgroundSpec b;
    b.kind = static_cast<BackgroundKind>(j.at("kind").get<int>());
    b.scene_seed = j.at("scene_seed").get<int64_t>();
    b.palette = j.at("palette").get<std::array<Rgb, 3>>();
    b.validate();
    return b;
}

}  // namespace mfv::world
