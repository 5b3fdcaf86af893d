#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "image.hpp"
#include "rng.hpp"

#include "json.hpp"

namespace mfv::world {

// Procedural scene model: a person is a head disk + hair cap + torso
// trapezoid + two arm capsules (+ legs for silhouette); the garment occupies
// the torso polygon, plus the sleeve capsules when sleeve = long_. All
// geometry is an analytic function of the specs, so exact garment masks and
// exact garment-swap ground truth come for free.

enum class Pattern : int { solid = 0, stripes = 1, checker = 2, dots = 3 };
enum class Sleeve : int { short_ = 0, long_ = 1 };
enum class BackgroundKind : int { studio_blank = 0, procedural_scene = 1 };
enum class PromptMode : int { masked = 0, maskfree = 1 };
enum class CorruptMode : int { overmask = 0, leak = 1 };

struct PersonSpec {
    int64_t body_seed = 0;
    Rgb skin_tone = {0.8, 0.65, 0.55};
    Rgb hair_color = {0.2, 0.12, 0.08};
    std::array<double, 2> arm_angles = {0.0, 0.0};  // radians, [-pi/3, pi/3], 0 = arms down
    double torso_scale = 1.0;                       // [0.8, 1.2]

    void validate() const;
};

struct GarmentSpec {
    Rgb base_color = {0.7, 0.2, 0.2};
    Pattern pattern = Pattern::solid;
    Rgb pattern_color = {0.95, 0.95, 0.95};
    int pattern_period = 4;                      // full repeat length in pixels, >= 2
    int logo_glyph = 0;                          // 0..7
    std::array<double, 2> logo_pos = {0.5, 0.5}; // normalized (u,v) in [0.1, 0.9]^2
    Sleeve sleeve = Sleeve::short_;

    void validate() const;
};

struct BackgroundSpec {
    BackgroundKind kind = BackgroundKind::studio_blank;
    int64_t scene_seed = 0;
    std::array<Rgb, 3> palette = {Rgb{0.45, 0.55, 0.7}, Rgb{0.75, 0.7, 0.6}, Rgb{0.4, 0.45, 0.35}};

    void validate() const;
};

struct WorldConfig {
    int height = 64;
    int width = 48;
    // studio gray is a dyadic rational so region means are exact in doubles
    double studio_gray = 208.0 / 256.0;
};

struct SceneRender {
    Image image;
    Mask garment_mask;     // 1 = visible garment pixels
    Mask background_mask;  // 1 = background pixels (the m of the compositing step)
    Image pose_map;        // skeleton lines on black; depends only on PersonSpec
    PersonSpec person;
    GarmentSpec garment;
    BackgroundSpec background;
};

SceneRender render_scene(const WorldConfig& wc, const PersonSpec& p, const GarmentSpec& g,
                         const BackgroundSpec& bg);

// flat lay-flat product shot of the garment on a blank backdrop
Image render_garment_product(const WorldConfig& wc, const GarmentSpec& g);

Image render_background(const WorldConfig& wc, const BackgroundSpec& bg);

// Garment-agnostic inpaint region: torso polygon plus full sleeve capsules,
// independent of the garment actually worn.
Mask agnostic_mask(const WorldConfig& wc, const PersonSpec& p);

Image render_pose_map(const WorldConfig& wc, const PersonSpec& p);

// person image with the mask region filled mid-gray (0.5)
Image mask_fill(const Image& img, const Mask& m, double fill = 0.5);

// --- prompts ---------------------------------------------------------------

// Token ids: [0,1] mode; [2,3] sleeve; [4..11] hue bucket; [12..15] pattern;
// [16..23] logo glyph; [24..32] logo position bucket (3x3). The sequence is
// [mode, sleeve, hue, pattern, glyph, position]; distinct id ranges per
// attribute make the map injective over the quantized attribute space.
inline constexpr int kPromptVocab = 33;
inline constexpr int kPromptLen = 6;

std::vector<int> prompt_tokens(const GarmentSpec& g, PromptMode mode);
int hue_bucket(const Rgb& c);  // 8 buckets of 45 degrees

// --- mask corruption (over-masking / leakage) -------------------------------

// overmask: `magnitude` rounds of dilation with a 3x3 cross.
// leak: `magnitude` rounds of erosion, then `magnitude` seeded radius-2 holes.
Mask corrupt_mask(const Mask& m, CorruptMode mode, int magnitude, uint64_t seed);

Mask dilate_cross(const Mask& m, int rounds);
Mask erode_cross(const Mask& m, int rounds);

// --- random spec sampling ----------------------------------------------------

PersonSpec sample_person(Prng& rng);
GarmentSpec sample_garment(Prng& rng);
BackgroundSpec sample_background(Prng& rng, BackgroundKind kind);

Rgb hsv_to_rgb(double h_deg, double s, double v);

// --- JSON (scene sidecars, manifests) ---------------------------------------

nlohmann::json to_json(const PersonSpec& p);
nlohmann::json to_json(const GarmentSpec& g);
nlohmann::json to_json(const BackgroundSpec& b);
PersonSpec person_from_json(const nlohmann::json& j);
GarmentSpec garment_from_json(const nlohmann::json& j);
BackgroundSpec background_from_json(const nlohmann::json& j);

}  // namespace mfv::world
