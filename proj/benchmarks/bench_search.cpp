#include <benchmark/benchmark.h>

#include "panobev/rng.hpp"
#include "panobev/search.hpp"

using namespace panobev;

namespace {

EmbeddingMatrix random_embeddings(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingMatrix emb;
  emb.rows.resize(n, d);
  emb.ids.resize(n);
  for (int r = 0; r < n; ++r) {
    double norm_sq = 0.0;
    for (int c = 0; c < d; ++c) {
      const double v = rng.uniform(-1.0, 1.0);
      emb.rows(r, c) = static_cast<float>(v);
      norm_sq += v * v;
    }
    const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (int c = 0; c < d; ++c) emb.rows(r, c) *= inv;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ref_%06d", r);
    emb.ids[r] = buf;
  }
  return emb;
}

}  // namespace

static void BM_search_topk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GalleryIndex gallery = make_gallery(random_embeddings(n, 64, 3), Modality::satellite);
  const Eigen::VectorXf q = gallery.refs.rows.row(n / 2).transpose();
  for (auto _ : state) {
    RankedList list = search(q, gallery, 10);
    benchmark::DoNotOptimize(list.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_search_topk)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_co_retrieve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GalleryIndex street = make_gallery(random_embeddings(n, 64, 5), Modality::satellite);
  const GalleryIndex bev = make_gallery(random_embeddings(n, 64, 7), Modality::satellite);
  // co_retrieve requires id-aligned galleries
  GalleryIndex bev_aligned = bev;
  bev_aligned.refs.ids = street.refs.ids;
  const Eigen::VectorXf qs = street.refs.rows.row(1).transpose();
  const Eigen::VectorXf qb = bev_aligned.refs.rows.row(1).transpose();
  const FusionConfig cfg{64};
  for (auto _ : state) {
    FusedList list = co_retrieve(qs, qb, street, bev_aligned, cfg, 10);
    benchmark::DoNotOptimize(list.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_co_retrieve)->Arg(1000)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
