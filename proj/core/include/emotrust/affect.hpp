#pragma once

#include <array>
#include <span>
#include <string_view>

namespace emotrust::affect {

enum class Emotion { joy, sad, surprise, fearful, angry };

/// Mood labels extend the five emotions with `neutral` (no active emotion).
enum class MoodLabel { joy, sad, surprise, fearful, angry, neutral };

enum class Personality { extroverted, neurotic, psychotic };

/// Continuous affect point. Pleasure and dominance live in [-1, 1],
/// arousal in [0, 1]; every operation below returns a clamped state.
struct PadState {
  double pleasure = 0.0;
  double arousal = 0.0;
  double dominance = 0.0;

  friend constexpr bool operator==(const PadState&, const PadState&) = default;
};

struct EmotionAnchor {
  Emotion label;
  double pleasure;
  double arousal;
  double dominance;
};

/// Basic-emotion coordinates in PAD space. Array order is also the
/// tie-breaking priority used by `mood`.
inline constexpr std::array<EmotionAnchor, 5> kAnchors{{
    {Emotion::joy, 0.75, 0.48, 0.35},
    {Emotion::sad, -0.63, 0.27, -0.33},
    {Emotion::surprise, 0.40, 0.67, -0.13},
    {Emotion::fearful, -0.64, 0.60, -0.43},
    {Emotion::angry, -0.51, 0.59, 0.25},
}};

const EmotionAnchor& anchor(Emotion e);

/// Softening constant that replaces V_p / V_d when personality enhances
/// the current sign of pleasure or dominance.
inline constexpr double kPersonalitySoftening = 0.05;

struct AffectParams {
  double delta_e = 0.2;  ///< full-intensity inner radius
  double phi_e = 1.0;    ///< radius at which intensity reaches zero
  double v_p = 0.1;
  double v_a = 0.1;
  double v_d = 0.1;
  /// When set, pleasure/dominance decay moves toward 0 and never crosses it
  /// instead of always subtracting.
  bool decay_toward_zero = false;

  /// Throws std::invalid_argument when the radii or constants are out of range.
  void validate() const;
};

/// Binary emotion sources, recomputed every cycle.
struct SourceVector {
  bool anger_perceived = false;
  bool own_privacy = false;
  bool alien_privacy = false;

  int sum() const { return int{anger_perceived} + int{own_privacy} + int{alien_privacy}; }
  friend constexpr bool operator==(const SourceVector&, const SourceVector&) = default;
};

struct Mood {
  MoodLabel label = MoodLabel::neutral;
  double intensity = 0.0;
};

enum class Dimension { pleasure, dominance };

struct EventDelta {
  Dimension dimension;
  double amount;
};

double distance(const PadState& pad, const EmotionAnchor& anchor);

/// Activation of one emotion: 1 inside delta_e, falling linearly to 0 at phi_e.
double emotion_intensity(const PadState& pad, const EmotionAnchor& anchor,
                         const AffectParams& params);

Mood mood(const PadState& pad, const AffectParams& params);

PadState clamp(PadState pad);

// Per-cycle dynamics. The engine applies them in the order
// apply_event_deltas, update_arousal, decay_pleasure, decay_dominance.
PadState decay_pleasure(const PadState& pad, affect::Personality personality,
                        const AffectParams& params);
PadState update_arousal(const PadState& pad, const SourceVector& prev,
                        const SourceVector& curr, const AffectParams& params);
PadState decay_dominance(const PadState& pad, affect::Personality personality,
                         const AffectParams& params);
PadState apply_event_deltas(const PadState& pad, std::span<const EventDelta> deltas);

double effective_pleasure_softening(double pleasure, Personality personality,
                                    const AffectParams& params);
double effective_dominance_softening(double dominance, Personality personality,
                                     const AffectParams& params);

std::string_view to_string(Emotion e);
std::string_view to_string(MoodLabel m);
std::string_view to_string(Personality p);
MoodLabel to_mood_label(Emotion e);

}  // namespace emotrust::affect
