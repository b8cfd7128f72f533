#pragma once

#include <optional>
#include <string_view>

#include "viia/guidance.hpp"
#include "viia/world.hpp"

namespace viia::feedback {

enum class CueSource { beacon, proximity };

std::string_view to_string(CueSource source);

// Binaural rendering parameters for one tick. The client synthesizes audio.
struct AudioCue {
  double left_gain = 0.0;
  double right_gain = 0.0;
  double itd_us = 0.0;  // positive: right ear leads
  std::optional<double> beep_period_ms;
  CueSource source = CueSource::beacon;
  double attenuation = 1.0;
};

struct CueParams {
  double reference_distance = 0.5;  // m, unity gain inside this radius
  double min_distance = 0.1;
  double head_radius = 0.0875;     // m
  double speed_of_sound = 343.0;   // m/s
  double period_min_ms = 80.0;
  double period_max_ms = 1000.0;
};

double attenuation(double distance, const CueParams& params = {});

// Spherical-head (Woodworth) interaural delay in microseconds.
double woodworth_itd_us(double azimuth_deg, const CueParams& params = {});

AudioCue spatial_cue(double azimuth_deg, double distance, const CueParams& params = {});

// Beep period in ms for a normalized alignment error; linear, clamped at e = 1.
double proximity_cue(double alignment_error, const CueParams& params = {});

std::optional<AudioCue> cue_for_phase(guidance::Phase phase, const world::WorldState& state,
                                      double alignment_error, const CueParams& params = {});

}  // namespace viia::feedback
