#include <array>
#include <string>
#include <vector>

#include "muller/error.hpp"
#include "muller/resizer.hpp"

namespace muller {

namespace {

struct PresetRow {
  const char* name;
  bool antialias;
  double alpha1;
  double beta1;
  double alpha2;
  double beta2;
};

// Learned values after ImageNet-1k training of each backbone, with
// anti-aliased and with aliased (plain) input downscaling.
constexpr std::array<PresetRow, 6> kPresets{{
    {"effnet_b0", true, 1.715, 0.088, -8.41, 0.001},
    {"mobilenet_v2", true, 1.480, 0.174, -5.25, -0.058},
    {"resnet50", true, 1.892, -0.014, -11.295, 0.003},
    {"effnet_b0", false, 1.632, -0.014, -7.265, 0.026},
    {"mobilenet_v2", false, 1.792, 0.269, -7.514, -0.077},
    {"resnet50", false, 1.687, -0.039, -12.637, 0.015},
}};

}  // namespace

std::vector<std::string> preset_names() { return {"effnet_b0", "mobilenet_v2", "resnet50"}; }

MullerParams preset(const std::string& name, bool antialias) {
  for (const PresetRow& row : kPresets) {
    if (name == row.name && antialias == row.antialias) {
      MullerParams params = MullerParams::with_layers(2);
      params.layers[0] = {row.alpha1, row.beta1};
      params.layers[1] = {row.alpha2, row.beta2};
      return params;
    }
  }
  fail(ErrorCode::InvalidArgument,
       "unknown preset '" + name + "' (expected effnet_b0, mobilenet_v2 or resnet50)");
}

}  // namespace muller
