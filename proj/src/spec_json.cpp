#include "qseqlab/spec_json.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qseqlab/common.hpp"

namespace qseqlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw SpecParseError(path + ": " + msg);
}

const json& field(const json& j, const std::string& path, const char* name) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(name);
  if (it == j.end()) fail(path + "." + name, "missing");
  return *it;
}

std::int64_t int_field(const json& j, const std::string& path, const char* name) {
  const json& v = field(j, path, name);
  if (!v.is_number_integer()) fail(path + "." + name, "expected an integer");
  return v.get<std::int64_t>();
}

Phase phase_field(const json& j, const std::string& path, const char* name) {
  const json& v = field(j, path, name);
  std::string p = path + "." + name;
  if (!v.is_object() || !v.contains("num") || !v.contains("den"))
    fail(p, "expected {\"num\", \"den\"}");
  if (!v["num"].is_number_integer() || !v["den"].is_number_integer())
    fail(p, "num and den must be integers");
  std::int64_t den = v["den"].get<std::int64_t>();
  if (den <= 0) fail(p + ".den", "must be positive");
  return Phase::rational(v["num"].get<std::int64_t>(), den);
}

std::uint32_t base_of(const json& j, const std::string& path, std::uint32_t inherited) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find("base");
  if (it == j.end()) {
    if (inherited == 0) fail(path + ".base", "missing");
    return inherited;
  }
  if (!it->is_number_integer()) fail(path + ".base", "expected an integer");
  std::int64_t b = it->get<std::int64_t>();
  if (b < 2 || b > 0xffffffffLL) fail(path + ".base", "out of range");
  if (inherited != 0 && static_cast<std::uint32_t>(b) != inherited)
    fail(path + ".base", "differs from the enclosing sequence");
  return static_cast<std::uint32_t>(b);
}

DigitalSequence parse_node(const json& j, const std::string& path, std::uint32_t inherited);

DigitalSequence parse_table(const json& j, const std::string& path, std::uint32_t q) {
  std::int64_t gap = int_field(j, path, "gap");
  if (gap < 0 || gap > 62) fail(path + ".gap", "out of range");
  const json& st = field(j, path, "strong");
  if (!st.is_boolean()) fail(path + ".strong", "expected a bool");
  CoefficientTable table(q, static_cast<int>(gap), st.get<bool>());

  const json& entries = field(j, path, "entries");
  if (!entries.is_array()) fail(path + ".entries", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::string ep = path + ".entries[" + std::to_string(i) + "]";
    const json& e = entries[i];
    const json& w = field(e, ep, "window");
    if (!w.is_array() || w.size() != static_cast<std::size_t>(gap) + 1)
      fail(ep + ".window", "expected " + std::to_string(gap + 1) + " digits");
    std::vector<std::uint32_t> window;
    for (const json& d : w) {
      if (!d.is_number_integer() || d.get<std::int64_t>() < 0 ||
          d.get<std::int64_t>() >= static_cast<std::int64_t>(q))
        fail(ep + ".window", "digit outside [0, base)");
      window.push_back(d.get<std::uint32_t>());
    }
    Phase ph = phase_field(e, ep, "phase");
    const json& pos = field(e, ep, "pos");
    try {
      if (pos.is_string() && pos.get<std::string>() == "any") {
        if (!table.strong()) fail(ep + ".pos", "\"any\" needs a strong table");
        table.set(window, ph);
      } else if (pos.is_number_integer() && pos.get<std::int64_t>() >= 0) {
        if (table.strong()) fail(ep + ".pos", "strong tables use \"any\"");
        table.set(static_cast<int>(pos.get<std::int64_t>()), window, ph);
      } else {
        fail(ep + ".pos", "expected a nonnegative integer or \"any\"");
      }
    } catch (const std::invalid_argument& ex) {
      fail(ep, ex.what());
    }
  }
  return from_coefficients(std::move(table));
}

DigitalSequence parse_node(const json& j, const std::string& path, std::uint32_t inherited) {
  std::uint32_t q = base_of(j, path, inherited);
  const json& kind = field(j, path, "kind");
  if (!kind.is_string()) fail(path + ".kind", "expected a string");
  std::string k = kind.get<std::string>();
  try {
    if (k == "linear") return builder_linear(q, phase_field(j, path, "alpha"));
    if (k == "digit_sum") return builder_digit_sum(q, phase_field(j, path, "alpha"));
    if (k == "block") {
      const json& p = field(j, path, "pattern");
      if (!p.is_string()) fail(path + ".pattern", "expected a string");
      return builder_block(q, p.get<std::string>(), phase_field(j, path, "alpha"));
    }
    if (k == "table") return parse_table(j, path, q);
    if (k == "product") {
      const json& factors = field(j, path, "factors");
      if (!factors.is_array() || factors.size() < 2)
        fail(path + ".factors", "expected an array of at least two sequences");
      DigitalSequence acc =
          parse_node(factors[0], path + ".factors[0]", q);
      for (std::size_t i = 1; i < factors.size(); ++i)
        acc = product(acc, parse_node(factors[i], path + ".factors[" + std::to_string(i) + "]", q));
      return acc;
    }
    if (k == "conjugate") return conjugate(parse_node(field(j, path, "of"), path + ".of", q));
    if (k == "dilate") return dilate(parse_node(field(j, path, "of"), path + ".of", q));
    if (k == "subsequence") {
      std::int64_t a = int_field(j, path, "a");
      std::int64_t b = int_field(j, path, "b");
      if (a < 1) fail(path + ".a", "must be positive");
      if (b < 0) fail(path + ".b", "must be nonnegative");
      return subsequence(parse_node(field(j, path, "of"), path + ".of", q),
                         static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
    }
  } catch (const SpecParseError&) {
    throw;
  } catch (const std::invalid_argument& ex) {
    fail(path, ex.what());
  }
  fail(path + ".kind", "unknown kind \"" + k + "\"");
}

json phase_json(const Phase& ph) {
  if (!ph.is_exact())
    throw std::invalid_argument("to_spec_json: phase has no exact rational form");
  return json{{"num", ph.num()}, {"den", ph.den()}};
}

std::string pattern_text(const DigitWord& w) {
  std::ostringstream out;
  for (std::size_t i = w.digits.size(); i-- > 0;) {
    if (w.base <= 10) {
      out << w.digits[i];
    } else {
      out << w.digits[i];
      if (i != 0) out << ',';
    }
  }
  return out.str();
}

nlohmann::ordered_json node_json(const SeqNode& node, std::uint32_t q);

nlohmann::ordered_json table_json(const TableSeq& t, std::uint32_t q) {
  const CoefficientTable& table = t.table();
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  int rows = table.strong() ? 1 : table.row_count();
  for (int pos = 0; pos < rows; ++pos)
    for (std::uint64_t code = 0; code < table.window_states(); ++code) {
      Phase ph = table.entry(pos, code);
      if (ph.is_exact() && ph.num() == 0) continue;
      nlohmann::ordered_json e;
      if (table.strong())
        e["pos"] = "any";
      else
        e["pos"] = pos;
      e["window"] = table.decode_window(code);
      e["phase"] = phase_json(ph);
      entries.push_back(std::move(e));
    }
  return {{"base", q},
          {"kind", "table"},
          {"gap", table.gap()},
          {"strong", table.strong()},
          {"entries", std::move(entries)}};
}

nlohmann::ordered_json node_json(const SeqNode& node, std::uint32_t q) {
  if (auto* t = dynamic_cast<const TableSeq*>(&node)) return table_json(*t, q);
  if (auto* l = dynamic_cast<const LinearSeq*>(&node))
    return {{"base", q}, {"kind", "linear"}, {"alpha", phase_json(l->alpha())}};
  if (auto* d = dynamic_cast<const DigitSumSeq*>(&node))
    return {{"base", q}, {"kind", "digit_sum"}, {"alpha", phase_json(d->alpha())}};
  if (auto* b = dynamic_cast<const BlockSeq*>(&node))
    return {{"base", q},
            {"kind", "block"},
            {"pattern", pattern_text(b->pattern())},
            {"alpha", phase_json(b->alpha())}};
  if (auto* p = dynamic_cast<const ProductSeq*>(&node))
    return {{"base", q},
            {"kind", "product"},
            {"factors", nlohmann::ordered_json::array(
                            {node_json(*p->left(), q), node_json(*p->right(), q)})}};
  if (auto* c = dynamic_cast<const ConjugateSeq*>(&node))
    return {{"base", q}, {"kind", "conjugate"}, {"of", node_json(*c->of(), q)}};
  if (auto* dl = dynamic_cast<const DilateSeq*>(&node))
    return {{"base", q}, {"kind", "dilate"}, {"of", node_json(*dl->of(), q)}};
  if (auto* s = dynamic_cast<const SubseqSeq*>(&node))
    return {{"base", q},
            {"kind", "subsequence"},
            {"of", node_json(*s->of(), q)},
            {"a", s->a()},
            {"b", s->b()}};
  throw std::invalid_argument("to_spec_json: unknown sequence node");
}

}  // namespace

DigitalSequence parse_sequence_spec(const nlohmann::json& j) {
  return parse_node(j, "$", 0);
}

DigitalSequence parse_sequence_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw SpecParseError(std::string("invalid JSON: ") + ex.what());
  }
  return parse_sequence_spec(j);
}

DigitalSequence parse_sequence_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sequence_spec(buf.str());
}

nlohmann::ordered_json to_spec_json(const DigitalSequence& f) {
  if (!f.node()) throw std::invalid_argument("to_spec_json: empty sequence");
  return node_json(*f.node(), f.base());
}

}  // namespace qseqlab
