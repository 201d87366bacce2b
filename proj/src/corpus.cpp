// Copyright 2026 The TableQuery Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tablequery/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tq {

namespace {

constexpr size_t kMaxWarnings = 20;

void warn(Corpus& c, std::string msg) {
  ++c.skipped;
  if (c.warnings.size() < kMaxWarnings) c.warnings.push_back(std::move(msg));
}

}  // namespace

const TableContext& Corpus::table(const std::string& id) const {
  auto it = tables.find(id);
  if (it == tables.end()) throw ValidationError("unknown table " + id);
  return *it->second;
}

Corpus Corpus::subset(const std::vector<size_t>& indices) const {
  Corpus out;
  out.tables = tables;
  for (size_t i : indices) out.examples.push_back(examples.at(i));
  return out;
}

Table infer_table(std::string name, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& cells, bool allow_dates) {
  std::vector<Column> columns;
  for (size_t c = 0; c < header.size(); ++c) {
    bool all_num = true, all_date = allow_dates, any = false;
    for (const auto& row : cells) {
      if (c >= row.size()) throw ValidationError("row narrower than the header");
      const std::string& text = row[c];
      if (normalize_text(text).empty()) continue;
      any = true;
      all_num = all_num && parse_number(text).has_value();
      all_date = all_date && text.find('-') != std::string::npos && Date::parse(text).has_value();
    }
    ColumnType type = ColumnType::kStr;
    if (any && all_num) {
      type = ColumnType::kNum;
    } else if (any && all_date) {
      type = ColumnType::kDate;
    }
    columns.push_back({header[c], type});
  }
  std::vector<std::vector<Value>> rows;
  rows.reserve(cells.size());
  for (const auto& rec : cells) {
    if (rec.size() != columns.size()) throw ValidationError("row width differs from the header");
    std::vector<Value> row;
    for (size_t c = 0; c < rec.size(); ++c) row.push_back(Table::parse_cell(rec[c], columns[c].type));
    rows.push_back(std::move(row));
  }
  return Table(std::move(name), std::move(columns), std::move(rows));
}

Table read_table_csv(std::istream& in, std::string name) {
  auto records = read_csv_records(in);
  if (records.empty()) throw ValidationError("empty CSV");
  const bool typed = records.size() >= 2 && records[1].size() == records[0].size() &&
                     std::all_of(records[1].begin(), records[1].end(),
                                 [](const std::string& s) { return parse_column_type(s).has_value(); });
  if (typed) {
    std::ostringstream os;
    for (const auto& rec : records) {
      for (size_t i = 0; i < rec.size(); ++i) os << (i ? "," : "") << csv_escape(rec[i]);
      os << "\n";
    }
    std::istringstream again(os.str());
    return Table::from_csv(again, std::move(name));
  }
  std::vector<std::string> header = records[0];
  records.erase(records.begin());
  return infer_table(std::move(name), header, records);
}

std::map<std::string, std::shared_ptr<const TableContext>> load_tables_dir(const std::string& dir,
                                                                           const Vocabulary& vocab) {
  std::map<std::string, std::shared_ptr<const TableContext>> out;
  if (!fs::is_directory(dir)) throw ValidationError("no table directory " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::ifstream in(p, std::ios::binary);
    const std::string id = p.stem().string();
    out.emplace(id, make_context(id, std::make_shared<Table>(read_table_csv(in, id)), vocab));
  }
  return out;
}

std::map<std::string, std::shared_ptr<const TableContext>> builtin_tables(const Vocabulary& vocab) {
  return load_tables_dir((fs::path(data_dir()) / "tables").string(), vocab);
}

Corpus read_corpus(std::istream& in, std::map<std::string, std::shared_ptr<const TableContext>> tables) {
  Corpus c;
  c.tables = std::move(tables);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (normalize_text(line).empty()) continue;
    try {
      const json j = json::parse(line);
      CorpusExample ex;
      ex.question = j.at("question").get<std::string>();
      ex.table = j.at("table").get<std::string>();
      ex.gold = bind_to_table(parse_sql(j.at("sql").get<std::string>()), *c.table(ex.table).table);
      c.examples.push_back(std::move(ex));
    } catch (const std::exception& e) {
      warn(c, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

Corpus load_corpus(const std::string& path, const std::string& tables_dir, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus " + path);
  const std::string dir = tables_dir.empty() ? (fs::path(data_dir()) / "tables").string() : tables_dir;
  return read_corpus(in, load_tables_dir(dir, vocab));
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& ex : corpus.examples) {
    json j;
    j["question"] = ex.question;
    j["table"] = ex.table;
    j["sql"] = render_sql(ex.gold, ex.table);
    out << j.dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// WikiSQL

WikiSqlCodes WikiSqlCodes::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open code table " + path);
  const json j = json::parse(in);
  return {j.at("agg_ops").get<std::vector<std::string>>(), j.at("cond_ops").get<std::vector<std::string>>()};
}

WikiSqlCodes WikiSqlCodes::load_default() { return load((fs::path(data_dir()) / "wikisql_codes.json").string()); }

namespace {

std::string cell_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

SqlQuery wikisql_query(const json& sql, const Table& t, const WikiSqlCodes& codes) {
  SqlQuery q;
  const int sel = sql.at("sel").get<int>();
  const int agg = sql.at("agg").get<int>();
  if (sel < 0 || sel >= t.num_columns()) throw ValidationError("select column out of range");
  if (agg < 0 || agg >= static_cast<int>(codes.agg_ops.size())) throw ValidationError("unknown aggregator code");
  SelectItem item{t.column(sel).name, std::nullopt};
  if (!codes.agg_ops[agg].empty()) {
    item.agg = parse_aggregator(codes.agg_ops[agg]);
    if (!item.agg) throw ValidationError("unsupported aggregator " + codes.agg_ops[agg]);
  }
  q.select.push_back(item);
  for (const json& cond : sql.at("conds")) {
    const int col = cond.at(0).get<int>();
    const int op = cond.at(1).get<int>();
    if (col < 0 || col >= t.num_columns()) throw ValidationError("condition column out of range");
    if (op < 0 || op >= static_cast<int>(codes.cond_ops.size())) throw ValidationError("unknown operator code");
    const std::string& sym = codes.cond_ops[op];
    CompareOp cop;
    if (sym == "=") {
      cop = CompareOp::kEq;
    } else if (sym == ">") {
      cop = CompareOp::kGt;
    } else if (sym == "<") {
      cop = CompareOp::kLt;
    } else {
      throw ValidationError("unsupported operator " + sym);
    }
    q.where.push_back({Condition{t.column(col).name, cop, Value{cell_text(cond.at(2))}}});
  }
  return bind_to_table(std::move(q), t);
}

Corpus load_wikisql(const std::string& dir, const std::string& split, const Vocabulary& vocab, size_t limit) {
  const WikiSqlCodes codes = WikiSqlCodes::load_default();
  Corpus c;
  const fs::path tables_path = fs::path(dir) / (split + ".tables.jsonl");
  const fs::path questions_path = fs::path(dir) / (split + ".jsonl");
  std::ifstream tin(tables_path);
  if (!tin) throw ValidationError("cannot open " + tables_path.string());
  std::map<std::string, std::shared_ptr<const Table>> raw;
  std::string line;
  while (std::getline(tin, line)) {
    if (normalize_text(line).empty()) continue;
    std::string id = "?";
    try {
      const json j = json::parse(line);
      id = j.at("id").get<std::string>();
      std::vector<std::string> header = j.at("header").get<std::vector<std::string>>();
      std::vector<std::vector<std::string>> cells;
      for (const json& row : j.at("rows")) {
        std::vector<std::string> r;
        for (const json& v : row) r.push_back(cell_text(v));
        cells.push_back(std::move(r));
      }
      raw.emplace(id, std::make_shared<Table>(infer_table(id, header, cells, /*allow_dates=*/false)));
    } catch (const std::exception& e) {
      if (c.warnings.size() < kMaxWarnings) c.warnings.push_back("table " + id + ": " + e.what());
    }
  }
  std::ifstream qin(questions_path);
  if (!qin) throw ValidationError("cannot open " + questions_path.string());
  size_t lineno = 0;
  while (std::getline(qin, line)) {
    ++lineno;
    if (normalize_text(line).empty()) continue;
    if (limit > 0 && c.examples.size() >= limit) break;
    try {
      const json j = json::parse(line);
      const std::string id = j.at("table_id").get<std::string>();
      auto t = raw.find(id);
      if (t == raw.end()) throw ValidationError("unknown or unusable table " + id);
      CorpusExample ex;
      ex.question = j.at("question").get<std::string>();
      ex.table = id;
      ex.gold = wikisql_query(j.at("sql"), *t->second, codes);
      if (!c.tables.count(id)) c.tables.emplace(id, make_context(id, t->second, vocab));
      c.examples.push_back(std::move(ex));
    } catch (const std::exception& e) {
      warn(c, split + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Generated WikiSQL-format slice

namespace {

enum class Gen { kPerson, kPick, kInt, kYear, kDecimal };

struct ColumnSpec {
  std::string name;
  Gen gen;
  std::vector<std::string> pool;  // kPick
  int lo = 0, hi = 0;             // kInt, kYear, kDecimal (tenths)
};

struct Domain {
  std::vector<ColumnSpec> columns;
};

const std::vector<std::string>& first_names() {
  static const std::vector<std::string> v = {"Alan",   "Maria",  "Jorge",  "Keiko", "Liam",  "Nadia", "Oscar",
                                             "Priya",  "Rafael", "Sofia",  "Tomas", "Ursula", "Viktor", "Wendell",
                                             "Yusuf",  "Zelda",  "Bruno",  "Clara", "Dmitri", "Elena"};
  return v;
}

const std::vector<std::string>& last_names() {
  static const std::vector<std::string> v = {"Abbott", "Brennan", "Castillo", "Dawson", "Eriksen", "Fujita",
                                             "Gallagher", "Halvorsen", "Ibarra", "Jansen", "Kowalski", "Lindqvist",
                                             "Moreau", "Nakamura", "Okafor", "Petrov", "Quintero", "Rossi"};
  return v;
}

const std::vector<Domain>& domains() {
  static const std::vector<Domain> d = {
      {{{"Player", Gen::kPerson, {}},
        {"Position", Gen::kPick, {"Forward", "Midfielder", "Defender", "Goalkeeper"}},
        {"Club", Gen::kPick, {"Rovers", "Athletic", "Wanderers", "Dynamo", "Rangers", "Albion"}},
        {"Nationality", Gen::kPick, {"Brazil", "Norway", "Japan", "Ghana", "Chile", "Poland"}},
        {"Goals", Gen::kInt, {}, 0, 35},
        {"Appearances", Gen::kInt, {}, 1, 60}}},
      {{{"Title", Gen::kPick, {"Red Harbor", "Silent Orchard", "Glass Kingdom", "Iron Meadow", "Paper Moon",
                               "Winter Lantern", "Hidden Valley", "Crimson Tide"}},
        {"Director", Gen::kPerson, {}},
        {"Genre", Gen::kPick, {"Drama", "Comedy", "Thriller", "Documentary", "Western"}},
        {"Year", Gen::kYear, {}, 1960, 2015},
        {"Gross", Gen::kInt, {}, 100000, 9000000},
        {"Rating", Gen::kDecimal, {}, 10, 99}}},
      {{{"District", Gen::kPick, {"Ohio 1", "Ohio 2", "Texas 4", "Texas 7", "Georgia 3", "Kansas 2", "Oregon 5"}},
        {"Incumbent", Gen::kPerson, {}},
        {"Party", Gen::kPick, {"Democratic", "Republican", "Independent"}},
        {"Result", Gen::kPick, {"Re-elected", "Retired", "Defeated"}},
        {"First elected", Gen::kYear, {}, 1950, 2000}}},
      {{{"Race", Gen::kPick, {"Monaco Grand Prix", "Italian Grand Prix", "Belgian Grand Prix", "Dutch Grand Prix",
                              "Swiss Grand Prix"}},
        {"Driver", Gen::kPerson, {}},
        {"Constructor", Gen::kPick, {"Ferrari", "Lotus", "Brabham", "Cooper", "Maserati"}},
        {"Laps", Gen::kInt, {}, 10, 80},
        {"Points", Gen::kInt, {}, 0, 10}}},
      {{{"City", Gen::kPick, {"Arlen", "Brixton", "Calloway", "Dunmore", "Eastwick", "Fairhaven", "Glenrock",
                              "Hollister"}},
        {"Province", Gen::kPick, {"Northland", "Westmark", "Southvale", "Eastmere"}},
        {"Population", Gen::kInt, {}, 5000, 900000},
        {"Area", Gen::kDecimal, {}, 100, 9000},
        {"Founded", Gen::kYear, {}, 1700, 1950}}},
      {{{"Album", Gen::kPick, {"Blue Horizon", "Electric Dreams", "Northern Lights", "Golden Hour", "Velvet Road",
                               "Stone Garden"}},
        {"Artist", Gen::kPerson, {}},
        {"Label", Gen::kPick, {"Motown", "Capitol", "Atlantic", "Sire", "Island"}},
        {"Year", Gen::kYear, {}, 1965, 2010},
        {"Chart position", Gen::kInt, {}, 1, 100}}},
      {{{"School", Gen::kPick, {"Lincoln High", "Roosevelt Academy", "Jefferson Prep", "Madison High",
                                "Franklin Academy", "Hamilton High"}},
        {"Location", Gen::kPick, {"Springfield", "Riverside", "Fairview", "Greenville"}},
        {"Mascot", Gen::kPick, {"Eagles", "Tigers", "Panthers", "Wolves", "Hornets"}},
        {"Enrollment", Gen::kInt, {}, 200, 3000},
        {"Conference", Gen::kPick, {"Central", "Coastal", "Mountain", "Valley"}}}},
      {{{"Episode", Gen::kPick, {"Pilot", "Homecoming", "Crossroads", "Reunion", "Nightfall", "Aftermath",
                                 "Lockdown"}},
        {"Director", Gen::kPerson, {}},
        {"Writer", Gen::kPerson, {}},
        {"Season", Gen::kInt, {}, 1, 9},
        {"Viewers", Gen::kDecimal, {}, 10, 250}}},
  };
  return d;
}

struct GenTable {
  std::string id;
  std::vector<std::string> header;
  std::vector<bool> numeric;
  std::vector<std::vector<json>> rows;
};

GenTable make_gen_table(const Domain& d, const std::string& id, std::mt19937_64& rng) {
  GenTable t;
  t.id = id;
  std::uniform_int_distribution<int> nrows(6, 14);
  const int n = nrows(rng);
  for (const auto& c : d.columns) {
    t.header.push_back(c.name);
    t.numeric.push_back(c.gen == Gen::kInt || c.gen == Gen::kYear || c.gen == Gen::kDecimal);
  }
  for (int r = 0; r < n; ++r) {
    std::vector<json> row;
    for (const auto& c : d.columns) {
      switch (c.gen) {
        case Gen::kPerson: {
          std::uniform_int_distribution<size_t> f(0, first_names().size() - 1), l(0, last_names().size() - 1);
          row.emplace_back(first_names()[f(rng)] + " " + last_names()[l(rng)]);
          break;
        }
        case Gen::kPick: {
          std::uniform_int_distribution<size_t> p(0, c.pool.size() - 1);
          row.emplace_back(c.pool[p(rng)]);
          break;
        }
        case Gen::kInt:
        case Gen::kYear: {
          std::uniform_int_distribution<int> v(c.lo, c.hi);
          row.emplace_back(v(rng));
          break;
        }
        case Gen::kDecimal: {
          std::uniform_int_distribution<int> v(c.lo, c.hi);
          row.emplace_back(v(rng) / 10.0);
          break;
        }
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string lower(std::string s) { return to_lower(s); }

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

bool chance(double p, std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

// One question in WikiSQL's style: a named select column, optional
// aggregator, conjunctive conditions taken from one row.
std::optional<std::pair<std::string, json>> make_wikisql_question(const GenTable& t, const WikiSqlCodes& codes,
                                                                  std::mt19937_64& rng) {
  const int ncols = static_cast<int>(t.header.size());
  std::uniform_int_distribution<int> colpick(0, ncols - 1);
  const int sel = colpick(rng);
  auto code_of = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<int>(std::find(v.begin(), v.end(), s) - v.begin());
  };
  std::string agg;
  const double roll = std::uniform_real_distribution<double>(0, 1)(rng);
  if (roll < 0.12) {
    agg = "COUNT";
  } else if (roll < 0.32 && t.numeric[sel]) {
    agg = pick(std::vector<std::string>{"SUM", "AVG", "MAX", "MIN"}, rng);
  }
  const auto& row = pick(t.rows, rng);
  std::vector<int> others;
  for (int c = 0; c < ncols; ++c) {
    if (c != sel) others.push_back(c);
  }
  std::shuffle(others.begin(), others.end(), rng);
  const int nconds = chance(0.25, rng) ? 2 : 1;
  json conds = json::array();
  std::vector<std::string> phrases;
  for (int k = 0; k < nconds && k < static_cast<int>(others.size()); ++k) {
    const int c = others[k];
    const std::string cname = lower(t.header[c]);
    if (t.numeric[c] && chance(0.6, rng)) {
      const double v = row[c].get<double>();
      const bool gt = chance(0.5, rng);
      const double n = std::floor(v);
      conds.push_back({c, code_of(codes.cond_ops, gt ? ">" : "<"), n});
      const std::string num = format_number(n);
      phrases.push_back(gt ? pick(std::vector<std::string>{cname + " larger than " + num, cname + " more than " + num,
                                                           cname + " greater than " + num},
                                  rng)
                           : pick(std::vector<std::string>{cname + " less than " + num, cname + " smaller than " + num,
                                                           cname + " under " + num},
                                  rng));
    } else {
      const std::string text = cell_text(row[c]);
      conds.push_back({c, code_of(codes.cond_ops, "="), row[c]});
      phrases.push_back(pick(std::vector<std::string>{cname + " " + text, cname + " of " + text, text,
                                                      "a " + cname + " of " + text},
                             rng));
    }
  }
  std::string cond_text;
  for (size_t i = 0; i < phrases.size(); ++i) cond_text += (i ? " and " : "") + phrases[i];
  const std::string s = lower(t.header[sel]);
  std::string q;
  if (agg.empty()) {
    q = pick(std::vector<std::string>{"what is the " + s + " when " + cond_text + "?",
                                      "what " + s + " has " + cond_text + "?",
                                      "name the " + s + " for " + cond_text,
                                      "which " + s + " has " + cond_text + "?",
                                      "tell me the " + s + " with " + cond_text},
             rng);
  } else if (agg == "COUNT") {
    q = pick(std::vector<std::string>{"how many " + s + " have " + cond_text + "?",
                                      "what is the number of " + s + " with " + cond_text + "?",
                                      "count the " + s + " for " + cond_text},
             rng);
  } else {
    const std::string w = agg == "SUM"   ? pick(std::vector<std::string>{"total", "sum of"}, rng)
                          : agg == "AVG" ? pick(std::vector<std::string>{"average", "mean"}, rng)
                          : agg == "MAX" ? pick(std::vector<std::string>{"highest", "maximum"}, rng)
                                         : pick(std::vector<std::string>{"lowest", "minimum"}, rng);
    q = pick(std::vector<std::string>{"what is the " + w + " " + s + " when " + cond_text + "?",
                                      "what was the " + w + " " + s + " for " + cond_text + "?",
                                      "name the " + w + " " + s + " with " + cond_text},
             rng);
  }
  json sql;
  sql["sel"] = sel;
  sql["agg"] = code_of(codes.agg_ops, agg);
  sql["conds"] = conds;
  return std::make_pair(q, sql);
}

}  // namespace

WikiSqlSliceStats write_wikisql_slice(const std::string& dir, uint64_t seed,
                                      const std::map<std::string, size_t>& split_sizes) {
  const WikiSqlCodes codes = WikiSqlCodes::load_default();
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  WikiSqlSliceStats stats;
  int table_no = 0;
  for (const auto& [split, n] : split_sizes) {
    std::ofstream tout(fs::path(dir) / (split + ".tables.jsonl"));
    std::ofstream qout(fs::path(dir) / (split + ".jsonl"));
    if (!tout || !qout) throw std::runtime_error("cannot write slice files under " + dir);
    size_t written = 0;
    while (written < n) {
      const Domain& d = domains()[static_cast<size_t>(table_no) % domains().size()];
      const GenTable t = make_gen_table(d, "2-" + std::to_string(1000 + table_no) + "-1", rng);
      ++table_no;
      ++stats.tables;
      json tj;
      tj["id"] = t.id;
      tj["header"] = t.header;
      std::vector<std::string> types;
      for (bool num : t.numeric) types.push_back(num ? "real" : "text");
      tj["types"] = types;
      tj["rows"] = t.rows;
      tout << tj.dump() << "\n";
      for (int k = 0; k < 8 && written < n; ++k) {
        auto q = make_wikisql_question(t, codes, rng);
        if (!q) continue;
        json qj;
        qj["phase"] = 1;
        qj["table_id"] = t.id;
        qj["question"] = q->first;
        qj["sql"] = q->second;
        qout << qj.dump() << "\n";
        ++written;
      }
    }
    stats.questions[split] = written;
  }
  return stats;
}

}  // namespace tq
