#pragma once

// Random synthetic scenes for testing and benchmarking: non-overlapping
// rotated rectangles and ring-sector curved lines, plus a map noise model.

#include "textmountain/polygon.hpp"
#include "textmountain/raster.hpp"

#include <random>
#include <vector>

namespace textmountain {

struct SceneConfig {
  int width = 640;
  int height = 640;
  int min_texts = 3;
  int max_texts = 12;
  double quad_min_height = 12;
  double quad_max_height = 80;
  double max_aspect = 10;
  double curved_fraction = 0.25;
  double curved_min_height = 16;
  double curved_max_height = 48;
  int separation = 2;   // minimum background gap in pixels
  int margin = 2;       // minimum gap to the image border
  int attempts = 200;   // placement tries per text
};

/// Draws a scene of non-overlapping text polygons.
std::vector<TextPolygon> random_scene(const SceneConfig& cfg, std::mt19937& rng);

/// Packs small texts as tightly as placement allows; used for the grouping
/// benchmark.
std::vector<TextPolygon> dense_scene(int width, int height, std::mt19937& rng);

struct NoiseConfig {
  double sigma = 0.05;       // Gaussian noise on TS and TCBP, clipped to [0, 1]
  double angle_deg = 5.0;    // Gaussian rotation of TCD vectors
};

/// Noisy copy of a 4-channel map bundle (TS, TCBP, TCD x, TCD y). Zero TCD
/// vectors stay zero.
RasterMap add_noise(const RasterMap& maps, const NoiseConfig& noise, std::mt19937& rng);

}  // namespace textmountain
