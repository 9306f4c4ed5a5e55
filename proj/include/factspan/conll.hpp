#pragma once

// CoNLL-style tabular parse ingestion. Heads are 1-based with 0 = root in
// the tabular convention; the toolkit stores 0-based arcs and drops the
// root attachment.

#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "factspan/error.hpp"
#include "factspan/types.hpp"

namespace factspan {

struct ConllRow {
  int index = 0;  // 1-based token index
  std::string form;
  int head = 0;  // 1-based head index, 0 = root
  std::string relation;
};

inline DependencyParse ingest_parse(const std::vector<std::string>& tokens,
                                    const std::vector<ConllRow>& rows,
                                    ParseRepr repr = ParseRepr::Basic) {
  if (rows.size() != tokens.size()) {
    throw ParseError("conll rows (" + std::to_string(rows.size()) +
                     ") not aligned with tokens (" +
                     std::to_string(tokens.size()) + ")");
  }
  const int n = static_cast<int>(tokens.size());
  DependencyParse parse;
  parse.token_count = tokens.size();
  parse.representation = repr;
  for (int i = 0; i < n; ++i) {
    const ConllRow& row = rows[i];
    if (row.index != i + 1) {
      throw ParseError("row " + std::to_string(i + 1) + ": index " +
                       std::to_string(row.index) + " out of sequence");
    }
    if (!row.form.empty() && row.form != "_" && row.form != tokens[i]) {
      throw ParseError("row " + std::to_string(i + 1) + ": form '" + row.form +
                       "' does not match token '" + tokens[i] + "'");
    }
    if (row.head < 0 || row.head > n) {
      throw ParseError("row " + std::to_string(i + 1) + ": head index " +
                       std::to_string(row.head) + " out of range [0, " +
                       std::to_string(n) + "]");
    }
    if (row.head == row.index) {
      throw ParseError("row " + std::to_string(i + 1) +
                       ": token is its own head");
    }
    if (row.head == 0) continue;  // root attachment is not stored
    parse.arcs.push_back(Arc{static_cast<std::size_t>(row.head - 1),
                             static_cast<std::size_t>(i), row.relation});
  }
  try {
    validate_parse(parse);
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return parse;
}

// Reads blank-line-separated sentences of tab/space-separated rows.
// Accepts the 4-column form (ID FORM HEAD DEPREL) and the 10-column
// CoNLL-X/U layout (FORM in column 2, HEAD in 7, DEPREL in 8). Comment
// lines and multi-word/empty-node ids (1-2, 1.1) are skipped.
inline std::vector<std::vector<ConllRow>> read_conll(std::istream& in) {
  std::vector<std::vector<ConllRow>> sentences;
  std::vector<ConllRow> current;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!current.empty()) {
      sentences.push_back(std::move(current));
      current.clear();
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> cols;
    std::string col;
    while (fields >> col) cols.push_back(col);
    if (cols[0].find('-') != std::string::npos ||
        cols[0].find('.') != std::string::npos) {
      continue;
    }
    ConllRow row;
    try {
      row.index = std::stoi(cols[0]);
      if (cols.size() >= 8) {
        row.form = cols[1];
        row.head = std::stoi(cols[6]);
        row.relation = cols[7];
      } else if (cols.size() == 4) {
        row.form = cols[1];
        row.head = std::stoi(cols[2]);
        row.relation = cols[3];
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": expected 4 or >=8 columns, got " +
                         std::to_string(cols.size()));
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("line " + std::to_string(line_no) + ": non-numeric index or head");
    } catch (const std::out_of_range&) {
      throw ParseError("line " + std::to_string(line_no) + ": index or head out of range");
    }
    current.push_back(std::move(row));
  }
  flush();
  return sentences;
}

}  // namespace factspan
