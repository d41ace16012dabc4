#include "emotrust/affect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace emotrust::affect {

namespace {

double clamp_signed(double v) { return std::clamp(v, -1.0, 1.0); }
double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

double decay_component(double value, double softening, double arousal, bool toward_zero) {
  const double step = softening * arousal;
  if (!toward_zero) return clamp_signed(value - step);
  if (value > 0.0) return clamp_signed(std::max(0.0, value - step));
  if (value < 0.0) return clamp_signed(std::min(0.0, value + step));
  return 0.0;
}

}  // namespace

const EmotionAnchor& anchor(Emotion e) { return kAnchors[static_cast<std::size_t>(e)]; }

void AffectParams::validate() const {
  if (!(delta_e > 0.0) || !(phi_e > delta_e)) {
    throw std::invalid_argument("affect radii must satisfy 0 < delta_e < phi_e (got delta_e=" +
                                std::to_string(delta_e) + ", phi_e=" + std::to_string(phi_e) + ")");
  }
  for (double v : {v_p, v_a, v_d}) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw std::invalid_argument("softening constants must lie in (0, 1], got " +
                                  std::to_string(v));
    }
  }
}

double distance(const PadState& pad, const EmotionAnchor& a) {
  const double dp = pad.pleasure - a.pleasure;
  const double da = pad.arousal - a.arousal;
  const double dd = pad.dominance - a.dominance;
  return std::sqrt(dp * dp + da * da + dd * dd);
}

double emotion_intensity(const PadState& pad, const EmotionAnchor& a, const AffectParams& params) {
  const double d = distance(pad, a);
  return clamp_unit(1.0 - (d - params.delta_e) / (params.phi_e - params.delta_e));
}

Mood mood(const PadState& pad, const AffectParams& params) {
  Mood best;
  for (const auto& a : kAnchors) {
    const double w = emotion_intensity(pad, a, params);
    // Strict comparison keeps the earlier anchor on ties.
    if (w > best.intensity) {
      best.intensity = w;
      best.label = to_mood_label(a.label);
    }
  }
  return best;
}

PadState clamp(PadState pad) {
  pad.pleasure = clamp_signed(pad.pleasure);
  pad.arousal = clamp_unit(pad.arousal);
  pad.dominance = clamp_signed(pad.dominance);
  return pad;
}

double effective_pleasure_softening(double pleasure, Personality personality,
                                    const AffectParams& params) {
  if ((personality == Personality::extroverted && pleasure > 0.0) ||
      (personality == Personality::neurotic && pleasure < 0.0)) {
    return kPersonalitySoftening;
  }
  return params.v_p;
}

double effective_dominance_softening(double dominance, Personality personality,
                                     const AffectParams& params) {
  if (personality == Personality::psychotic && dominance > 0.0) return kPersonalitySoftening;
  return params.v_d;
}

PadState decay_pleasure(const PadState& pad, Personality personality, const AffectParams& params) {
  PadState out = clamp(pad);
  out.pleasure = decay_component(out.pleasure,
                                 effective_pleasure_softening(out.pleasure, personality, params),
                                 out.arousal, params.decay_toward_zero);
  return out;
}

PadState update_arousal(const PadState& pad, const SourceVector& prev, const SourceVector& curr,
                        const AffectParams& params) {
  PadState out = clamp(pad);
  out.arousal = clamp_unit(out.arousal + (curr.sum() - prev.sum()) * params.v_a);
  return out;
}

PadState decay_dominance(const PadState& pad, Personality personality, const AffectParams& params) {
  PadState out = clamp(pad);
  out.dominance = decay_component(out.dominance,
                                  effective_dominance_softening(out.dominance, personality, params),
                                  out.arousal, params.decay_toward_zero);
  return out;
}

PadState apply_event_deltas(const PadState& pad, std::span<const EventDelta> deltas) {
  PadState out = pad;
  for (const auto& d : deltas) {
    if (d.dimension == Dimension::pleasure) {
      out.pleasure += d.amount;
    } else {
      out.dominance += d.amount;
    }
  }
  return clamp(out);
}

std::string_view to_string(Emotion e) { return to_string(to_mood_label(e)); }

std::string_view to_string(MoodLabel m) {
  switch (m) {
    case MoodLabel::joy: return "joy";
    case MoodLabel::sad: return "sad";
    case MoodLabel::surprise: return "surprise";
    case MoodLabel::fearful: return "fearful";
    case MoodLabel::angry: return "angry";
    case MoodLabel::neutral: return "neutral";
  }
  return "neutral";
}

std::string_view to_string(Personality p) {
  switch (p) {
    case Personality::extroverted: return "extroverted";
    case Personality::neurotic: return "neurotic";
    case Personality::psychotic: return "psychotic";
  }
  return "extroverted";
}

MoodLabel to_mood_label(Emotion e) { return static_cast<MoodLabel>(static_cast<int>(e)); }

}  // namespace emotrust::affect
