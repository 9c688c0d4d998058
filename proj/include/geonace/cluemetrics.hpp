// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "geonace/dataset.hpp"
#include "geonace/error.hpp"
#include "geonace/inference.hpp"
#include "geonace/pipeline.hpp"
#include "geonace/taxonomy.hpp"

namespace geonace {

using Rational = boost::multiprecision::cpp_rational;

// "12/13", "1", "0".
std::string to_string(const Rational& r);
double to_double(const Rational& r);

struct KeywordHit {
  std::string keyword;  // lowercased
  SectionCode section;

  friend bool operator==(const KeywordHit&, const KeywordHit&) = default;
};

// Bracketed tokens resolved through the lexicon, with multiplicity. Unknown
// tokens are dropped and reported as "unknown_keyword".
std::vector<KeywordHit> extract_keywords(const ClueText& clue, const Taxonomy& taxonomy,
                                         Diagnostics* diagnostics = nullptr);

struct FrequencyVector {
  std::array<Rational, kSectionCount> values{};

  Rational sum() const;
  bool is_zero() const;
  friend bool operator==(const FrequencyVector&, const FrequencyVector&) = default;
};

// Count per section over total count; the empty list gives the zero vector.
FrequencyVector frequency_vector(std::span<const KeywordHit> keywords);

struct ClueProfile {
  std::array<std::optional<FrequencyVector>, kClueSourceCount> vectors{};

  bool has(ClueSource s) const { return vectors[index_of(s)].has_value(); }
};

ClueProfile clue_profile(std::span<const ClueText> clues, const Taxonomy& taxonomy,
                         Diagnostics* diagnostics = nullptr);

enum class ProjectionKind { kGroundTruth, kPrediction };

struct ProjectionVector {
  std::array<Rational, kClueSourceCount> values{};
  ProjectionKind kind = ProjectionKind::kGroundTruth;
  SectionCode label = SectionCode::from_index(0);
};

// Component c is the source-c vector at `label`, 0 when the source is absent.
ProjectionVector project(const ClueProfile& profile, SectionCode label, ProjectionKind kind);

using SourceCounts = std::array<std::int64_t, kClueSourceCount>;
using SourceRatios = std::array<std::optional<Rational>, kClueSourceCount>;

// Mean projection component per source. Sources with a zero count are absent.
SourceRatios correctness(std::span<const ProjectionVector> ground_truth, const SourceCounts& inferences);
SourceRatios effectiveness(std::span<const ProjectionVector> predictions, const SourceCounts& inferences);
// 1 - NEI/I; absent when I is 0.
std::optional<Rational> information_discovery(std::int64_t no_evidence, std::int64_t inferences);

struct ClassStats {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::int64_t support = 0;
};

// Column index of UNK in the confusion matrix.
inline constexpr int kUnknownColumn = kSectionCount;

struct RecordProjection {
  std::int64_t entry_id = 0;
  SectionCode truth = SectionCode::from_index(0);
  ProjectionVector ground_truth;
  std::optional<ProjectionVector> prediction;
};

struct MetricReport {
  std::int64_t records = 0;
  std::int64_t failed = 0;
  std::int64_t inferences = 0;  // I: non-failed records
  std::int64_t correct = 0;
  std::int64_t unknown = 0;     // U
  std::int64_t violations = 0;
  Rational accuracy;
  Rational unknown_ratio;
  Rational violation_ratio;

  // Rows are ground truth; the last column counts UNK predictions.
  std::array<std::array<std::int64_t, kSectionCount + 1>, kSectionCount> confusion{};
  std::array<std::int64_t, kSectionCount> violations_by_truth{};
  std::map<SectionCode, ClassStats> per_class;  // sections present in ground truth
  double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
  double weighted_precision = 0, weighted_recall = 0, weighted_f1 = 0;

  // Clue metrics, multi_turn records only.
  std::int64_t multi_turn_inferences = 0;
  SourceCounts clue_calls{};        // I_c for information discovery
  SourceCounts no_evidence{};       // NEI_c
  SourceCounts scored_inferences{}; // I_c for correctness/effectiveness (UNK/VIOLATION excluded)
  SourceRatios correctness;
  SourceRatios effectiveness;
  SourceRatios information_discovery;
  std::vector<RecordProjection> projections;
};

// Throws kValidation for an entry id missing from the dataset, and for an
// empty record list.
MetricReport score(std::span<const InferenceRecord> records, const Dataset& dataset, const Taxonomy& taxonomy,
                   Diagnostics* diagnostics = nullptr);

nlohmann::json report_to_json(const MetricReport& report);
std::string render_report(const MetricReport& report);
// One row per clue source: source,I_c,NEI_c,scored,correctness,effectiveness,information_discovery.
std::string render_source_csv(const MetricReport& report);

}  // namespace geonace
