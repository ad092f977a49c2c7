#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "panobev/descriptor.hpp"
#include "panobev/embedding.hpp"
#include "panobev/encoder.hpp"
#include "panobev/geometry.hpp"
#include "panobev/manifest.hpp"
#include "panobev/splits.hpp"
#include "panobev/train.hpp"
#include "panobev/warp.hpp"

namespace panobev {

enum class Branch { street, bev };
std::string to_string(Branch branch);
Branch branch_from_string(const std::string& s);

/// Shared settings for turning manifest records into descriptors.
struct PipelineConfig {
  BevPlaneSpec plane{256, 0.14};
  double camera_height_m = 1.5;
  int grid = 8;
  bool compensate_heading = true;  // BEV branch un-rotates panoramas with known heading
};

/// In-process warp-map reuse across records, keyed by every parameter the
/// map depends on. Maps are immutable once built.
class WarpMapCache {
 public:
  const WarpMap& get(const BevPlaneSpec& plane, const CameraRig& rig, const PanoramaSpec& pano);

 private:
  std::map<std::tuple<int, double, double, double, int, int>, WarpMap> maps_;
};

/// Warps a panorama to the BEV plane. When a heading is given and
/// compensation is on, the view is rotated back to the reference frame
/// first (losslessly for whole-column headings, otherwise via the map's
/// yaw offset).
ImageBuffer bev_from_panorama(const ImageBuffer& pano, const BevPlaneSpec& plane,
                              double camera_height_m, std::optional<double> heading_deg,
                              bool compensate, WarpMapCache& cache);

struct BranchDescriptors {
  std::vector<std::string> ids;
  std::vector<Eigen::VectorXd> descriptors;
};

/// Query-side descriptors for the listed record ids: the raw panorama for
/// the street branch, its BEV reprojection for the BEV branch.
BranchDescriptors query_descriptors(const std::vector<PairRecord>& records,
                                    const std::vector<std::string>& ids,
                                    const std::filesystem::path& root, Branch branch,
                                    const PipelineConfig& cfg, WarpMapCache& cache);

/// Reference-side descriptors (satellite or map imagery).
BranchDescriptors reference_descriptors(const std::vector<PairRecord>& records,
                                        const std::vector<std::string>& ids,
                                        const std::filesystem::path& root, Modality modality,
                                        const PipelineConfig& cfg);

/// Encodes descriptors into a unit-row embedding matrix.
EmbeddingMatrix embed_vectors(const std::vector<Eigen::VectorXd>& descriptors,
                              const std::vector<std::string>& ids, const EncoderParams& params);

/// Trains one branch on a split's pairs (query k against its first
/// positive reference).
TrainResult train_branch_on_split(const std::vector<PairRecord>& records, const SplitSpec& split,
                                  Branch branch, const std::filesystem::path& root,
                                  const TrainConfig& train_cfg, const PipelineConfig& cfg,
                                  WarpMapCache& cache);

}  // namespace panobev
