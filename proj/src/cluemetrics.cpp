// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/cluemetrics.hpp"

#include <regex>

#include <fmt/format.h>

#include "strings.hpp"

namespace geonace {

std::string to_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::vector<KeywordHit> extract_keywords(const ClueText& clue, const Taxonomy& taxonomy, Diagnostics* diagnostics) {
  static const std::regex bracketed(R"(\[([^\[\]\n]*)\])");
  std::vector<KeywordHit> hits;
  for (std::sregex_iterator it(clue.text.begin(), clue.text.end(), bracketed), end; it != end; ++it) {
    const auto token = str::lower(str::trim((*it)[1].str()));
    if (const auto section = taxonomy.section_for_keyword(token)) {
      hits.push_back({token, *section});
    } else if (diagnostics) {
      diagnostics->warn("unknown_keyword", std::string(to_string(clue.source)), "[" + token + "]");
    }
  }
  return hits;
}

Rational FrequencyVector::sum() const {
  Rational total = 0;
  for (const auto& v : values) total += v;
  return total;
}

bool FrequencyVector::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](const Rational& v) { return v == 0; });
}

FrequencyVector frequency_vector(std::span<const KeywordHit> keywords) {
  FrequencyVector out;
  if (keywords.empty()) return out;
  std::array<std::int64_t, kSectionCount> counts{};
  for (const auto& k : keywords) ++counts[k.section.index()];
  const auto total = static_cast<std::int64_t>(keywords.size());
  for (int i = 0; i < kSectionCount; ++i) out.values[i] = Rational(counts[i], total);
  return out;
}

ClueProfile clue_profile(std::span<const ClueText> clues, const Taxonomy& taxonomy, Diagnostics* diagnostics) {
  ClueProfile profile;
  for (const auto& clue : clues) {
    auto& slot = profile.vectors[index_of(clue.source)];
    if (slot) {
      throw Error(ErrorCode::kValidation, "two clues for source " + std::string(to_string(clue.source)));
    }
    slot = frequency_vector(extract_keywords(clue, taxonomy, diagnostics));
  }
  return profile;
}

ProjectionVector project(const ClueProfile& profile, SectionCode label, ProjectionKind kind) {
  ProjectionVector p;
  p.kind = kind;
  p.label = label;
  for (int c = 0; c < kClueSourceCount; ++c) {
    if (profile.vectors[c]) p.values[c] = profile.vectors[c]->values[label.index()];
  }
  return p;
}

namespace {

SourceRatios mean_projection(std::span<const ProjectionVector> projections, const SourceCounts& inferences) {
  SourceRatios out;
  for (int c = 0; c < kClueSourceCount; ++c) {
    if (inferences[c] <= 0) continue;
    Rational total = 0;
    for (const auto& p : projections) total += p.values[c];
    out[c] = total / inferences[c];
  }
  return out;
}

}  // namespace

SourceRatios correctness(std::span<const ProjectionVector> ground_truth, const SourceCounts& inferences) {
  return mean_projection(ground_truth, inferences);
}

SourceRatios effectiveness(std::span<const ProjectionVector> predictions, const SourceCounts& inferences) {
  return mean_projection(predictions, inferences);
}

std::optional<Rational> information_discovery(std::int64_t no_evidence, std::int64_t inferences) {
  if (inferences <= 0) return std::nullopt;
  return Rational(1) - Rational(no_evidence, inferences);
}

MetricReport score(std::span<const InferenceRecord> records, const Dataset& dataset, const Taxonomy& taxonomy,
                   Diagnostics* diagnostics) {
  if (records.empty()) throw Error(ErrorCode::kValidation, "no records to score");
  MetricReport rep;
  std::vector<ProjectionVector> gt, pred;
  for (const auto& r : records) {
    const auto* entry = dataset.find(r.entry_id);
    if (!entry) {
      throw Error(ErrorCode::kValidation, "record references entry " + std::to_string(r.entry_id) +
                                              " which is not in the dataset");
    }
    ++rep.records;
    if (r.failed) {
      ++rep.failed;
      continue;
    }
    ++rep.inferences;
    const auto truth = entry->category;
    switch (r.prediction.kind) {
      case Prediction::Kind::kSection:
        ++rep.confusion[truth.index()][r.prediction.section->index()];
        if (*r.prediction.section == truth) ++rep.correct;
        break;
      case Prediction::Kind::kUnknown:
        ++rep.confusion[truth.index()][kUnknownColumn];
        ++rep.unknown;
        break;
      case Prediction::Kind::kViolation:
        ++rep.violations_by_truth[truth.index()];
        ++rep.violations;
        break;
    }
    if (r.pipeline != Pipeline::kMultiTurn) continue;

    ++rep.multi_turn_inferences;
    for (const auto& clue : r.clues) {
      ++rep.clue_calls[index_of(clue.source)];
      if (is_no_evidence(clue.text)) ++rep.no_evidence[index_of(clue.source)];
    }
    const auto profile = clue_profile(r.clues, taxonomy, diagnostics);
    RecordProjection rp;
    rp.entry_id = r.entry_id;
    rp.truth = truth;
    rp.ground_truth = project(profile, truth, ProjectionKind::kGroundTruth);
    if (r.prediction.kind == Prediction::Kind::kSection) {
      rp.prediction = project(profile, *r.prediction.section, ProjectionKind::kPrediction);
      for (auto s : kClueSources) {
        if (profile.has(s)) ++rep.scored_inferences[index_of(s)];
      }
      gt.push_back(rp.ground_truth);
      pred.push_back(*rp.prediction);
    }
    rep.projections.push_back(std::move(rp));
  }

  if (rep.inferences > 0) {
    rep.accuracy = Rational(rep.correct, rep.inferences);
    rep.unknown_ratio = Rational(rep.unknown, rep.inferences);
    rep.violation_ratio = Rational(rep.violations, rep.inferences);
  }

  std::array<std::int64_t, kSectionCount> predicted{};
  for (const auto& row : rep.confusion) {
    for (int c = 0; c < kSectionCount; ++c) predicted[c] += row[c];
  }
  std::int64_t total_support = 0;
  for (int s = 0; s < kSectionCount; ++s) {
    std::int64_t support = rep.violations_by_truth[s];
    for (auto v : rep.confusion[s]) support += v;
    if (support == 0) continue;
    ClassStats st;
    st.support = support;
    const auto tp = static_cast<double>(rep.confusion[s][s]);
    st.precision = predicted[s] ? tp / static_cast<double>(predicted[s]) : 0.0;
    st.recall = tp / static_cast<double>(support);
    st.f1 = st.precision + st.recall > 0 ? 2 * st.precision * st.recall / (st.precision + st.recall) : 0.0;
    rep.per_class.emplace(SectionCode::from_index(s), st);
    total_support += support;
  }
  if (!rep.per_class.empty()) {
    const auto n = static_cast<double>(rep.per_class.size());
    for (const auto& [code, st] : rep.per_class) {
      rep.macro_precision += st.precision / n;
      rep.macro_recall += st.recall / n;
      rep.macro_f1 += st.f1 / n;
      const auto w = static_cast<double>(st.support) / static_cast<double>(total_support);
      rep.weighted_precision += w * st.precision;
      rep.weighted_recall += w * st.recall;
      rep.weighted_f1 += w * st.f1;
    }
  }

  rep.correctness = correctness(gt, rep.scored_inferences);
  rep.effectiveness = effectiveness(pred, rep.scored_inferences);
  for (int c = 0; c < kClueSourceCount; ++c) {
    rep.information_discovery[c] = information_discovery(rep.no_evidence[c], rep.clue_calls[c]);
  }
  return rep;
}

namespace {

nlohmann::json ratio_json(const std::optional<Rational>& r) {
  if (!r) return nullptr;
  return {{"value", to_double(*r)}, {"exact", to_string(*r)}};
}

nlohmann::json vector_json(const ProjectionVector& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : p.values) out.push_back(to_string(v));
  return out;
}

std::string fmt_ratio(const std::optional<Rational>& r) {
  return r ? fmt::format("{:.4f}", to_double(*r)) : std::string("n/a");
}

std::string fmt_vector(const ProjectionVector& p) {
  std::string out = "[";
  for (int c = 0; c < kClueSourceCount; ++c) out += (c ? ", " : "") + to_string(p.values[c]);
  return out + "]";
}

}  // namespace

nlohmann::json report_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["counts"] = {{"records", r.records},       {"failed", r.failed},   {"I", r.inferences},
                 {"correct", r.correct},       {"U", r.unknown},       {"violations", r.violations},
                 {"multi_turn", r.multi_turn_inferences}};
  j["accuracy"] = ratio_json(r.accuracy);
  j["unknown_ratio"] = ratio_json(r.unknown_ratio);
  j["instruction_violation_ratio"] = ratio_json(r.violation_ratio);
  j["macro"] = {{"precision", r.macro_precision}, {"recall", r.macro_recall}, {"f1", r.macro_f1}};
  j["weighted"] = {{"precision", r.weighted_precision}, {"recall", r.weighted_recall}, {"f1", r.weighted_f1}};
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [code, st] : r.per_class) {
    per_class[code.str()] = {{"precision", st.precision}, {"recall", st.recall}, {"f1", st.f1}, {"support", st.support}};
  }
  j["per_class"] = per_class;

  nlohmann::json columns = nlohmann::json::array();
  for (const auto& s : all_sections()) columns.push_back(s.str());
  columns.push_back("UNK");
  nlohmann::json matrix = nlohmann::json::array();
  for (const auto& row : r.confusion) matrix.push_back(row);
  j["confusion"] = {{"rows", "ground truth A..U"},
                    {"columns", columns},
                    {"matrix", matrix},
                    {"violations_by_truth", r.violations_by_truth}};

  nlohmann::json sources = nlohmann::json::object();
  for (auto s : kClueSources) {
    const int c = index_of(s);
    sources[std::string(to_string(s))] = {{"clue_calls", r.clue_calls[c]},
                                          {"no_evidence", r.no_evidence[c]},
                                          {"scored_inferences", r.scored_inferences[c]},
                                          {"correctness", ratio_json(r.correctness[c])},
                                          {"effectiveness", ratio_json(r.effectiveness[c])},
                                          {"information_discovery", ratio_json(r.information_discovery[c])}};
  }
  j["sources"] = sources;
  j["notes"] = {"UNK and VIOLATION predictions are excluded from correctness/effectiveness sums and from their I_c",
                "I_c counts only inferences where source c was present"};
  nlohmann::json projections = nlohmann::json::array();
  for (const auto& p : r.projections) {
    nlohmann::json item = {{"entry_id", p.entry_id}, {"truth", p.truth.str()}, {"v_g", vector_json(p.ground_truth)}};
    if (p.prediction) {
      item["prediction"] = p.prediction->label.str();
      item["v_p"] = vector_json(*p.prediction);
    } else {
      item["v_p"] = nullptr;
    }
    projections.push_back(item);
  }
  j["projections"] = projections;
  return j;
}

std::string render_report(const MetricReport& r) {
  std::string out;
  out += fmt::format("records {}  failed {}  I {}  correct {}  U {}  violations {}\n", r.records, r.failed,
                     r.inferences, r.correct, r.unknown, r.violations);
  out += fmt::format("accuracy {:.4f}  unknown_ratio {:.4f}  violation_ratio {:.4f}\n", to_double(r.accuracy),
                     to_double(r.unknown_ratio), to_double(r.violation_ratio));
  out += fmt::format("macro     P {:.4f}  R {:.4f}  F1 {:.4f}\n", r.macro_precision, r.macro_recall, r.macro_f1);
  out += fmt::format("weighted  P {:.4f}  R {:.4f}  F1 {:.4f}\n", r.weighted_precision, r.weighted_recall,
                     r.weighted_f1);
  out += "\nsection  support  precision  recall  f1\n";
  for (const auto& [code, st] : r.per_class) {
    out += fmt::format("{:<7}  {:>7}  {:>9.4f}  {:>6.4f}  {:.4f}\n", code.str(), st.support, st.precision, st.recall,
                       st.f1);
  }
  if (r.multi_turn_inferences > 0) {
    out += fmt::format("\nclue metrics over {} multi-turn inferences\n", r.multi_turn_inferences);
    out += "source     calls  NEI  scored  correctness  effectiveness  info_discovery\n";
    for (auto s : kClueSources) {
      const int c = index_of(s);
      out += fmt::format("{:<9}  {:>5}  {:>3}  {:>6}  {:>11}  {:>13}  {:>14}\n", to_string(s), r.clue_calls[c],
                         r.no_evidence[c], r.scored_inferences[c], fmt_ratio(r.correctness[c]),
                         fmt_ratio(r.effectiveness[c]), fmt_ratio(r.information_discovery[c]));
    }
    out += "\nentry  truth  v_g  pred  v_p\n";
    for (const auto& p : r.projections) {
      out += fmt::format("{}  {}  {}  {}  {}\n", p.entry_id, p.truth.str(), fmt_vector(p.ground_truth),
                         p.prediction ? p.prediction->label.str() : "-",
                         p.prediction ? fmt_vector(*p.prediction) : "-");
    }
  }
  return out;
}

std::string render_source_csv(const MetricReport& r) {
  std::string out = "source,I_c,NEI_c,scored,correctness,effectiveness,information_discovery\n";
  const auto cell = [](const std::optional<Rational>& v) {
    return v ? fmt::format("{:.6f}", to_double(*v)) : std::string();
  };
  for (auto s : kClueSources) {
    const int c = index_of(s);
    out += fmt::format("{},{},{},{},{},{},{}\n", to_string(s), r.clue_calls[c], r.no_evidence[c],
                       r.scored_inferences[c], cell(r.correctness[c]), cell(r.effectiveness[c]),
                       cell(r.information_discovery[c]));
  }
  return out;
}

}  // namespace geonace
