#include "panobev/pipeline.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "panobev/pano_ops.hpp"
#include "panobev/png_io.hpp"

namespace panobev {

std::string to_string(Branch branch) { return branch == Branch::street ? "street" : "bev"; }

Branch branch_from_string(const std::string& s) {
  if (s == "street") return Branch::street;
  if (s == "bev") return Branch::bev;
  throw std::invalid_argument("unknown branch '" + s + "' (expected street or bev)");
}

const WarpMap& WarpMapCache::get(const BevPlaneSpec& plane, const CameraRig& rig,
                                 const PanoramaSpec& pano) {
  const auto key = std::make_tuple(plane.side_px, plane.res_m, rig.height_m, rig.yaw_offset,
                                   pano.height_px, pano.width_px);
  auto hit = maps_.find(key);
  if (hit == maps_.end()) {
    hit = maps_.emplace(key, build_warp_map(plane, rig, pano)).first;
  }
  return hit->second;
}

ImageBuffer bev_from_panorama(const ImageBuffer& pano, const BevPlaneSpec& plane,
                              double camera_height_m, std::optional<double> heading_deg,
                              bool compensate, WarpMapCache& cache) {
  const PanoramaSpec pano_spec{pano.height, pano.width};
  double yaw = 0.0;
  const ImageBuffer* source = &pano;
  ImageBuffer unshifted;

  if (compensate && heading_deg) {
    const double cols = *heading_deg / 360.0 * pano.width;
    const double rounded = std::round(cols);
    if (std::abs(cols - rounded) < 1e-9) {
      // Whole-column heading: undo it losslessly and share the yaw-0 map.
      unshifted = yaw_shift(pano, -static_cast<int>(rounded));
      source = &unshifted;
    } else {
      yaw = -*heading_deg * std::numbers::pi / 180.0;
    }
  }

  const WarpMap& map = cache.get(plane, CameraRig{camera_height_m, yaw}, pano_spec);
  return apply_warp(*source, map);
}

namespace {

std::unordered_map<std::string, const PairRecord*> index_records(
    const std::vector<PairRecord>& records) {
  std::unordered_map<std::string, const PairRecord*> idx;
  idx.reserve(records.size());
  for (const PairRecord& r : records) idx[r.id] = &r;
  return idx;
}

const PairRecord& record_for(const std::unordered_map<std::string, const PairRecord*>& idx,
                             const std::string& id) {
  auto hit = idx.find(id);
  if (hit == idx.end()) {
    throw std::invalid_argument("pipeline: id '" + id + "' not present in the manifest");
  }
  return *hit->second;
}

}  // namespace

BranchDescriptors query_descriptors(const std::vector<PairRecord>& records,
                                    const std::vector<std::string>& ids,
                                    const std::filesystem::path& root, Branch branch,
                                    const PipelineConfig& cfg, WarpMapCache& cache) {
  const auto idx = index_records(records);
  BranchDescriptors out;
  out.ids = ids;
  out.descriptors.reserve(ids.size());
  for (const std::string& id : ids) {
    const PairRecord& rec = record_for(idx, id);
    const ImageBuffer pano = read_png(root / rec.panorama_path);
    if (branch == Branch::street) {
      out.descriptors.push_back(extract_descriptor(pano, cfg.grid));
    } else {
      const ImageBuffer bev = bev_from_panorama(pano, cfg.plane, cfg.camera_height_m,
                                                rec.heading_deg, cfg.compensate_heading, cache);
      out.descriptors.push_back(extract_descriptor(bev, cfg.grid));
    }
  }
  return out;
}

BranchDescriptors reference_descriptors(const std::vector<PairRecord>& records,
                                        const std::vector<std::string>& ids,
                                        const std::filesystem::path& root, Modality modality,
                                        const PipelineConfig& cfg) {
  const auto idx = index_records(records);
  BranchDescriptors out;
  out.ids = ids;
  out.descriptors.reserve(ids.size());
  for (const std::string& id : ids) {
    const PairRecord& rec = record_for(idx, id);
    std::string rel;
    if (modality == Modality::satellite) {
      rel = rec.satellite_path;
    } else {
      if (!rec.map_path) {
        throw std::invalid_argument("pipeline: record '" + id + "' has no map_path");
      }
      rel = *rec.map_path;
    }
    out.descriptors.push_back(extract_descriptor(read_png(root / rel), cfg.grid));
  }
  return out;
}

EmbeddingMatrix embed_vectors(const std::vector<Eigen::VectorXd>& descriptors,
                              const std::vector<std::string>& ids, const EncoderParams& params) {
  if (descriptors.size() != ids.size()) {
    throw std::invalid_argument("embed_vectors: descriptor/id count mismatch");
  }
  EmbeddingMatrix emb;
  emb.rows.resize(static_cast<Eigen::Index>(descriptors.size()), params.output_dim());
  emb.ids = ids;
  for (std::size_t k = 0; k < descriptors.size(); ++k) {
    const EncodeResult enc = encode(descriptors[k], params);
    emb.rows.row(static_cast<Eigen::Index>(k)) = enc.embedding.cast<float>().transpose();
  }
  return emb;
}

TrainResult train_branch_on_split(const std::vector<PairRecord>& records, const SplitSpec& split,
                                  Branch branch, const std::filesystem::path& root,
                                  const TrainConfig& train_cfg, const PipelineConfig& cfg,
                                  WarpMapCache& cache) {
  if (split.query_ids.empty()) {
    throw std::invalid_argument("train_branch_on_split: split has no training pairs");
  }
  std::vector<std::string> ref_ids;
  ref_ids.reserve(split.query_ids.size());
  for (const std::string& q : split.query_ids) {
    auto pos = split.positives.find(q);
    if (pos == split.positives.end() || pos->second.empty()) {
      throw std::invalid_argument("train_branch_on_split: query '" + q + "' has no positive");
    }
    ref_ids.push_back(pos->second.front());
  }

  const BranchDescriptors queries =
      query_descriptors(records, split.query_ids, root, branch, cfg, cache);
  const BranchDescriptors refs =
      reference_descriptors(records, ref_ids, root, split.modality, cfg);
  return train_branch(queries.descriptors, refs.descriptors, train_cfg);
}

}  // namespace panobev
