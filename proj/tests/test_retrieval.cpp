#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "panobev/protocol.hpp"
#include "panobev/recall.hpp"
#include "panobev/rng.hpp"
#include "panobev/search.hpp"

using namespace panobev;

namespace {

/// Gallery whose rows are drawn from a small pool of distinct unit
/// vectors, so exact score ties occur, with ids shuffled so that the
/// ascending-id tie rule actually reorders.
EmbeddingMatrix pooled_gallery(int n, int d, int pool_size, Rng& rng) {
  std::vector<Eigen::VectorXf> pool;
  for (int p = 0; p < pool_size; ++p) {
    Eigen::VectorXf v(d);
    double norm_sq = 0.0;
    for (int c = 0; c < d; ++c) {
      v[c] = static_cast<float>(rng.uniform(-1.0, 1.0));
      norm_sq += static_cast<double>(v[c]) * v[c];
    }
    v /= static_cast<float>(std::sqrt(norm_sq));
    pool.push_back(v);
  }
  EmbeddingMatrix emb;
  emb.rows.resize(n, d);
  emb.ids.resize(n);
  for (int r = 0; r < n; ++r) {
    emb.rows.row(r) = pool[rng.next_below(pool.size())].transpose();
  }
  const auto perm = random_permutation(n, rng);
  for (int r = 0; r < n; ++r) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "id_%04zu", perm[r]);
    emb.ids[r] = buf;
  }
  return emb;
}

Eigen::VectorXf random_unit(int d, Rng& rng) {
  Eigen::VectorXf v(d);
  double norm_sq = 0.0;
  for (int c = 0; c < d; ++c) {
    v[c] = static_cast<float>(rng.uniform(-1.0, 1.0));
    norm_sq += static_cast<double>(v[c]) * v[c];
  }
  return v / static_cast<float>(std::sqrt(norm_sq));
}

float oracle_dot(const Eigen::VectorXf& q, const EmbeddingMatrix& emb, int row) {
  float acc = 0.0f;
  for (Eigen::Index c = 0; c < emb.rows.cols(); ++c) acc += q[c] * emb.rows(row, c);
  return acc;
}

/// Full-sort oracle with the same similarity and tie rule.
std::vector<std::pair<std::string, float>> oracle_rank(const Eigen::VectorXf& q,
                                                       const EmbeddingMatrix& emb) {
  std::vector<std::pair<std::string, float>> scored;
  for (int r = 0; r < emb.count(); ++r) scored.push_back({emb.ids[r], oracle_dot(q, emb, r)});
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return scored;
}

}  // namespace

TEST_CASE("search: trivial galleries") {
  EmbeddingMatrix emb;
  emb.rows = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Identity(3, 3);
  emb.ids = {"a", "b", "c"};
  const GalleryIndex gallery = make_gallery(emb, Modality::satellite);

  Eigen::VectorXf q(3);
  q << 1, 0, 0;
  const RankedList top = search(q, gallery, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].id == "a");
  CHECK(top[0].score == 1.0f);
  CHECK(top[1].score == 0.0f);
  CHECK(top[2].score == 0.0f);
  CHECK(top[1].id == "b");  // tie broken by ascending id
  CHECK(top[2].id == "c");

  CHECK_THROWS_AS(search(q, gallery, 4), std::invalid_argument);
  CHECK_THROWS_AS(search(q, gallery, 0), std::invalid_argument);
  CHECK_THROWS_AS(search(Eigen::VectorXf::Ones(2), gallery, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_gallery(EmbeddingMatrix{}, Modality::satellite), std::invalid_argument);
}

TEST_CASE("search matches the brute-force oracle exactly, ties included") {
  Rng rng(81);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 10 + static_cast<int>(rng.next_below(60));
    const int d = 4 + static_cast<int>(rng.next_below(16));
    const GalleryIndex gallery =
        make_gallery(pooled_gallery(n, d, 1 + n / 3, rng), Modality::satellite);
    const Eigen::VectorXf q = random_unit(d, rng);
    const int k = 1 + static_cast<int>(rng.next_below(n));

    const RankedList got = search(q, gallery, k);
    const auto expected = oracle_rank(q, gallery.refs);
    REQUIRE(got.size() == static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
      CHECK(got[r].id == expected[r].first);
      CHECK(got[r].score == expected[r].second);
    }
  }
}

TEST_CASE("co_retrieve: hand-verified fusion over the shortlist") {
  EmbeddingMatrix street, bev;
  street.rows = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Identity(3, 4);
  street.ids = {"a", "b", "c"};
  bev.rows = street.rows;
  bev.ids = street.ids;
  const GalleryIndex gs = make_gallery(street, Modality::satellite);
  const GalleryIndex gb = make_gallery(bev, Modality::satellite);

  Eigen::VectorXf q_street(4), q_bev(4);
  q_street << 0.9f, 0.8f, 0.7f, 0.0f;  // S1
  q_bev << 0.1f, 0.5f, 0.2f, 0.0f;     // S2

  const FusedList fused = co_retrieve(q_street, q_bev, gs, gb, FusionConfig{3}, 3);
  REQUIRE(fused.size() == 3);
  CHECK(fused[0].id == "b");  // 0.8 + 0.5 = 1.3 wins
  CHECK(fused[0].score_fused == doctest::Approx(1.3f));
  CHECK(fused[0].score_s1 == doctest::Approx(0.8f));
  CHECK(fused[0].score_s2 == doctest::Approx(0.5f));
  CHECK(fused[1].id == "a");  // 1.0
  CHECK(fused[2].id == "c");  // 0.9

  SUBCASE("shortlist smaller than k or larger than the gallery is rejected") {
    CHECK_THROWS_AS(co_retrieve(q_street, q_bev, gs, gb, FusionConfig{2}, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(co_retrieve(q_street, q_bev, gs, gb, FusionConfig{4}, 1),
                    std::invalid_argument);
  }

  SUBCASE("id-misaligned galleries are rejected") {
    EmbeddingMatrix other = bev;
    other.ids = {"a", "b", "d"};
    const GalleryIndex gd = make_gallery(other, Modality::satellite);
    CHECK_THROWS_AS(co_retrieve(q_street, q_bev, gs, gd, FusionConfig{3}, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("co_retrieve: BEV query orthogonal to every reference leaves street order") {
  Rng rng(83);
  EmbeddingMatrix emb;
  emb.rows.resize(5, 6);
  emb.ids = {"r0", "r1", "r2", "r3", "r4"};
  for (int r = 0; r < 5; ++r) {
    Eigen::VectorXf v = Eigen::VectorXf::Zero(6);
    v[r] = 1.0f;  // references span the first five axes
    emb.rows.row(r) = v.transpose();
  }
  const GalleryIndex gallery = make_gallery(emb, Modality::satellite);

  Eigen::VectorXf q_street = random_unit(6, rng);
  Eigen::VectorXf q_bev = Eigen::VectorXf::Zero(6);
  q_bev[5] = 1.0f;  // orthogonal to the whole gallery: S2 = 0

  const FusedList fused = co_retrieve(q_street, q_bev, gallery, FusionConfig{5}, 5);
  const RankedList street_only = search(q_street, gallery, 5);
  REQUIRE(fused.size() == street_only.size());
  for (std::size_t r = 0; r < fused.size(); ++r) {
    CHECK(fused[r].id == street_only[r].id);
    CHECK(fused[r].score_s2 == 0.0f);
  }
}

TEST_CASE("co_retrieve with M = gallery equals the exhaustive fused oracle") {
  Rng rng(85);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 8 + static_cast<int>(rng.next_below(40));
    const int d = 4 + static_cast<int>(rng.next_below(12));
    const GalleryIndex gs =
        make_gallery(pooled_gallery(n, d, 2 + n / 3, rng), Modality::satellite);
    EmbeddingMatrix bev_emb = pooled_gallery(n, d, 2 + n / 3, rng);
    bev_emb.ids = gs.refs.ids;
    const GalleryIndex gb = make_gallery(bev_emb, Modality::satellite);
    const Eigen::VectorXf qs = random_unit(d, rng);
    const Eigen::VectorXf qb = random_unit(d, rng);

    const FusedList got = co_retrieve(qs, qb, gs, gb, FusionConfig{n}, n);

    std::vector<std::pair<std::string, float>> expected;
    for (int r = 0; r < n; ++r) {
      expected.push_back({gs.refs.ids[r], oracle_dot(qs, gs.refs, r) + oracle_dot(qb, gb.refs, r)});
    }
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    REQUIRE(got.size() == expected.size());
    for (int r = 0; r < n; ++r) {
      CHECK(got[r].id == expected[r].first);
      CHECK(got[r].score_fused == expected[r].second);
    }
  }
}

TEST_CASE("co_retrieve ranking is invariant to a constant shift of S1") {
  // every reference shares a 0.6 component on the last axis, so moving
  // the street query along that axis shifts every S1 by the same amount
  Rng rng(87);
  const int n = 12, d = 8;
  EmbeddingMatrix emb;
  emb.rows.resize(n, d);
  emb.ids.resize(n);
  const float beta = 0.6f;
  for (int r = 0; r < n; ++r) {
    Eigen::VectorXf head = Eigen::VectorXf::Zero(d);
    for (int c = 0; c < d - 1; ++c) head[c] = static_cast<float>(rng.uniform(-1.0, 1.0));
    head *= std::sqrt(1.0f - beta * beta) / head.norm();
    head[d - 1] = beta;
    emb.rows.row(r) = head.transpose();
    emb.ids[r] = "ref_" + std::to_string(r);
  }
  const GalleryIndex gallery = make_gallery(emb, Modality::satellite);
  Eigen::VectorXf qs = random_unit(d, rng);
  const Eigen::VectorXf qb = random_unit(d, rng);

  const FusedList base = co_retrieve(qs, qb, gallery, FusionConfig{8}, 8);
  Eigen::VectorXf qs_shifted = qs;
  qs_shifted[d - 1] += 0.5f / beta;  // adds 0.5 to every S1
  const FusedList shifted = co_retrieve(qs_shifted, qb, gallery, FusionConfig{8}, 8);

  REQUIRE(base.size() == shifted.size());
  for (std::size_t r = 0; r < base.size(); ++r) CHECK(base[r].id == shifted[r].id);
}

TEST_CASE("recall_at_k fixtures at gallery 1000") {
  const int gallery = 1000;
  auto ranked_with_positive_at = [&](int rank) {
    std::vector<std::string> ids;
    for (int r = 1; r <= 20; ++r) {
      ids.push_back(r == rank ? "pos" : "neg_" + std::to_string(r));
    }
    return ids;
  };

  struct Fixture {
    int rank;
    double r1, r5, r10, r1pct;
  };
  const Fixture fixtures[] = {
      {1, 100, 100, 100, 100}, {3, 0, 100, 100, 100}, {7, 0, 0, 100, 100}, {15, 0, 0, 0, 0}};
  for (const Fixture& f : fixtures) {
    const RecallReport rep =
        recall_at_k({ranked_with_positive_at(f.rank)}, {{"pos"}}, gallery, "fixture");
    CHECK(rep.k_1pct == 10);
    CHECK(rep.r1 == f.r1);
    CHECK(rep.r5 == f.r5);
    CHECK(rep.r10 == f.r10);
    CHECK(rep.r1pct == f.r1pct);
    CHECK(rep.query_count == 1);
    CHECK(rep.gallery_size == 1000);
  }
}

TEST_CASE("recall_at_k: monotone in K, errors, ceil rule") {
  SUBCASE("all queries hit at rank 1") {
    const RecallReport rep = recall_at_k({{"x"}, {"y"}}, {{"x"}, {"y"}}, 200, "perfect");
    CHECK(rep.r1 == 100.0);
    CHECK(rep.r5 == 100.0);
    CHECK(rep.r10 == 100.0);
    CHECK(rep.r1pct == 100.0);
    CHECK(rep.k_1pct == 2);
  }

  SUBCASE("monotone on random instances") {
    Rng rng(91);
    for (int trial = 0; trial < 30; ++trial) {
      const int queries = 3 + static_cast<int>(rng.next_below(10));
      std::vector<std::vector<std::string>> ranked(queries), positives(queries);
      for (int q = 0; q < queries; ++q) {
        for (int r = 0; r < 15; ++r) ranked[q].push_back("g" + std::to_string(rng.next_below(40)));
        positives[q] = {"g" + std::to_string(rng.next_below(40))};
      }
      const RecallReport rep = recall_at_k(ranked, positives, 40, "rand");
      CHECK(rep.r1 <= rep.r5);
      CHECK(rep.r5 <= rep.r10);
      CHECK(rep.r10 <= 100.0);
    }
  }

  SUBCASE("K beyond the gallery errors") {
    CHECK_THROWS_AS(recall_at_k({{"x"}}, {{"x"}}, 5, "tiny"), std::invalid_argument);
  }
  SUBCASE("query without positives errors") {
    CHECK_THROWS_AS(recall_at_k({{"x"}}, {{}}, 100, "orphan"), std::invalid_argument);
  }
  SUBCASE("ceil rule: gallery 101 -> K_1% = 2") {
    const RecallReport rep = recall_at_k({{"x"}}, {{"x"}}, 101, "ceil");
    CHECK(rep.k_1pct == 2);
  }
}

TEST_CASE("recall CSV row format") {
  RecallReport rep;
  rep.protocol = "val:fused";
  rep.r1 = 83.5;
  rep.r5 = 94.25;
  rep.r10 = 97.0;
  rep.r1pct = 99.125;  // %.2f rounds half to even
  rep.query_count = 50;
  rep.gallery_size = 400;
  CHECK(recall_csv_header() == "protocol,R1,R5,R10,R1pct,queries,gallery");
  CHECK(recall_csv_row(rep) == "val:fused,83.50,94.25,97.00,99.12,50,400");
}

namespace {

/// Tiny deterministic protocol world: every query embedding equals its
/// positive reference's embedding in both branches, so fused and
/// single-branch retrievals all rank the positive first.
ProtocolEmbeddings toy_embeddings(const std::vector<std::string>& query_ids,
                                  const std::vector<std::string>& ref_ids, int d, Rng& rng) {
  ProtocolEmbeddings emb;
  EmbeddingMatrix refs;
  refs.rows.resize(static_cast<Eigen::Index>(ref_ids.size()), d);
  refs.ids = ref_ids;
  for (std::size_t r = 0; r < ref_ids.size(); ++r) {
    refs.rows.row(static_cast<Eigen::Index>(r)) = random_unit(d, rng).transpose();
  }
  EmbeddingMatrix queries;
  queries.rows.resize(static_cast<Eigen::Index>(query_ids.size()), d);
  queries.ids = query_ids;
  for (std::size_t q = 0; q < query_ids.size(); ++q) {
    const auto hit = std::find(ref_ids.begin(), ref_ids.end(), query_ids[q]);
    REQUIRE(hit != ref_ids.end());
    queries.rows.row(static_cast<Eigen::Index>(q)) =
        refs.rows.row(hit - ref_ids.begin());
  }
  emb.street_queries = queries;
  emb.bev_queries = queries;
  emb.street_refs = refs;
  emb.bev_refs = refs;
  return emb;
}

SplitSpec toy_split(const std::vector<std::string>& ids) {
  SplitSpec split;
  split.name = "toy";
  split.protocol = "regional";
  split.query_ids = ids;
  split.reference_ids = ids;
  for (const auto& id : ids) split.positives[id] = {id};
  return split;
}

}  // namespace

TEST_CASE("evaluate_protocol: modes, gallery hygiene, orphan detection") {
  Rng rng(95);
  std::vector<std::string> ids;
  for (int k = 0; k < 12; ++k) ids.push_back("s" + std::to_string(100 + k));
  const ProtocolEmbeddings emb = toy_embeddings(ids, ids, 16, rng);
  SplitSpec split = toy_split(ids);
  split.excluded_reference_ids = {"train_1", "train_2"};

  SUBCASE("perfect embeddings give 100 across modes") {
    for (EvalMode mode : {EvalMode::street_only, EvalMode::bev_only, EvalMode::fused}) {
      const RecallReport rep = evaluate_protocol(split, emb, FusionConfig{64}, mode);
      CHECK(rep.r1 == 100.0);
      CHECK(rep.gallery_size == 12);
      CHECK(rep.query_count == 12);
      CHECK(rep.protocol == "toy:" + to_string(mode));
    }
  }

  SUBCASE("a leaked training reference trips the protocol check") {
    SplitSpec leaked = split;
    leaked.excluded_reference_ids.push_back(ids[3]);
    CHECK_THROWS_AS(evaluate_protocol(leaked, emb, FusionConfig{64}, EvalMode::fused),
                    protocol_error);
  }

  SUBCASE("a query whose positives are outside the gallery is reported") {
    SplitSpec orphan = split;
    orphan.positives[ids[2]] = {"nowhere"};
    CHECK_THROWS_AS(evaluate_protocol(orphan, emb, FusionConfig{64}, EvalMode::street_only),
                    protocol_error);
  }

  SUBCASE("missing embeddings are an input error, not a protocol violation") {
    ProtocolEmbeddings missing = emb;
    missing.street_refs.ids[0] = "someone_else";
    CHECK_THROWS_AS(evaluate_protocol(split, missing, FusionConfig{64}, EvalMode::street_only),
                    std::invalid_argument);
  }

  SUBCASE("dump captures per-query rankings") {
    std::vector<QueryRanking> dump;
    evaluate_protocol(split, emb, FusionConfig{64}, EvalMode::fused, &dump);
    REQUIRE(dump.size() == ids.size());
    CHECK(dump[0].query_id == ids[0]);
    REQUIRE_FALSE(dump[0].entries.empty());
    CHECK(dump[0].entries[0].id == ids[0]);  // the positive wins
  }
}
