#pragma once

// JSONL serialization of annotated examples. One object per line:
//
//   {"id": ..., "doc_tokens": [...], "sum_tokens": [...],
//    "arcs": [[head, child, "rel"], ...], "parse_repr": "basic"|"collapsed",
//    "sent_label": 0|1, "word_mask": [0|1, ...]|null,
//    "arc_labels": [0|1, ...]|null, "provenance": "entc"|"genc"|"human"|"pred",
//    "error_tags": [{"cat", "orient", "start", "end"}, ...]|null, "meta": {...}}
//
// 1 = NonFactual. Output is byte-deterministic: keys are emitted sorted and
// the schema carries no floating-point values (scores travel in meta as
// fixed-format strings).

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "factspan/error.hpp"
#include "factspan/types.hpp"

namespace factspan {

inline nlohmann::json to_json(const AnnotatedExample& ex) {
  nlohmann::json j;
  j["id"] = ex.id;
  j["doc_tokens"] = ex.document.tokens;
  j["sum_tokens"] = ex.summary.tokens;
  nlohmann::json arcs = nlohmann::json::array();
  for (const Arc& a : ex.summary.parse.arcs) {
    arcs.push_back({a.head_index, a.child_index, a.relation});
  }
  j["arcs"] = std::move(arcs);
  j["parse_repr"] = to_string(ex.summary.parse.representation);
  j["sent_label"] = ex.labels.sentence_label == Label::NonFactual ? 1 : 0;
  if (ex.labels.word_mask) {
    j["word_mask"] = *ex.labels.word_mask;
  } else {
    j["word_mask"] = nullptr;
  }
  if (ex.labels.arc_labels) {
    std::vector<int> labels;
    labels.reserve(ex.labels.arc_labels->size());
    for (Label l : *ex.labels.arc_labels) {
      labels.push_back(l == Label::NonFactual ? 1 : 0);
    }
    j["arc_labels"] = std::move(labels);
  } else {
    j["arc_labels"] = nullptr;
  }
  j["provenance"] = to_string(ex.labels.provenance);
  if (ex.error_tags) {
    nlohmann::json tags = nlohmann::json::array();
    for (const ErrorTag& t : *ex.error_tags) {
      tags.push_back({{"cat", to_string(t.category)},
                      {"orient", to_string(t.orientation)},
                      {"start", t.span.begin},
                      {"end", t.span.end}});
    }
    j["error_tags"] = std::move(tags);
  } else {
    j["error_tags"] = nullptr;
  }
  auto meta = ex.document.meta;
  if (!ex.document.id.empty() && ex.document.id != ex.id) {
    meta["doc_id"] = ex.document.id;  // extracted again on load
  }
  j["meta"] = std::move(meta);
  return j;
}

inline AnnotatedExample example_from_json(const nlohmann::json& j) {
  AnnotatedExample ex;
  ex.id = j.at("id").get<std::string>();

  std::map<std::string, std::string> meta;
  if (j.contains("meta") && !j.at("meta").is_null()) {
    meta = j.at("meta").get<std::map<std::string, std::string>>();
  }
  std::string doc_id = ex.id;
  if (auto it = meta.find("doc_id"); it != meta.end()) {
    doc_id = it->second;
    meta.erase(it);
  }
  ex.document = Document::from_tokens(
      std::move(doc_id), j.at("doc_tokens").get<std::vector<std::string>>(),
      std::move(meta));

  ex.summary.id = ex.id;
  ex.summary.tokens = j.at("sum_tokens").get<std::vector<std::string>>();
  ex.summary.parse.token_count = ex.summary.tokens.size();
  if (j.contains("parse_repr") && !j.at("parse_repr").is_null()) {
    ex.summary.parse.representation =
        parse_repr_from_string(j.at("parse_repr").get<std::string>());
  }
  for (const auto& arc : j.at("arcs")) {
    if (!arc.is_array() || arc.size() != 3) {
      throw ParseError("arcs: expected [head, child, relation] triples");
    }
    ex.summary.parse.arcs.push_back(Arc{arc.at(0).get<std::size_t>(),
                                        arc.at(1).get<std::size_t>(),
                                        arc.at(2).get<std::string>()});
  }

  ex.labels.sentence_label =
      j.at("sent_label").get<int>() != 0 ? Label::NonFactual : Label::Factual;
  if (j.contains("word_mask") && !j.at("word_mask").is_null()) {
    ex.labels.word_mask = j.at("word_mask").get<WordMask>();
  }
  if (j.contains("arc_labels") && !j.at("arc_labels").is_null()) {
    std::vector<Label> labels;
    for (const auto& v : j.at("arc_labels")) {
      labels.push_back(v.get<int>() != 0 ? Label::NonFactual : Label::Factual);
    }
    ex.labels.arc_labels = std::move(labels);
  }
  ex.labels.provenance =
      provenance_from_string(j.at("provenance").get<std::string>());

  if (j.contains("error_tags") && !j.at("error_tags").is_null()) {
    std::vector<ErrorTag> tags;
    for (const auto& t : j.at("error_tags")) {
      tags.push_back(ErrorTag{
          error_category_from_string(t.at("cat").get<std::string>()),
          orientation_from_string(t.at("orient").get<std::string>()),
          Span{t.at("start").get<std::size_t>(), t.at("end").get<std::size_t>()}});
    }
    ex.error_tags = std::move(tags);
  }
  return ex;
}

struct LoadResult {
  std::vector<AnnotatedExample> examples;
  std::size_t skipped = 0;  // lenient mode only
};

// Reads one example per line. In strict mode any malformed line or invariant
// violation aborts with an error naming the line; in lenient mode such lines
// are skipped and counted.
inline LoadResult load_examples(const std::string& path, bool strict = true) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      AnnotatedExample ex = example_from_json(j);
      validate_example(ex);
      result.examples.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      if (strict) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
      ++result.skipped;
    } catch (const Error& e) {
      if (strict) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": " +
                              e.what());
      }
      ++result.skipped;
    }
  }
  return result;
}

// Byte-deterministic writer: sorted keys, no floats, one line per example.
inline std::size_t save_examples(const std::vector<AnnotatedExample>& examples,
                                 const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  for (const AnnotatedExample& ex : examples) {
    out << to_json(ex).dump() << '\n';
  }
  out.flush();
  if (!out) {
    throw IoError("write failed for '" + path + "'");
  }
  return examples.size();
}

}  // namespace factspan
