#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "tdscw/milp.hpp"

namespace tdscw::milp {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_terms(std::ostream& out, const std::vector<std::pair<int, double>>& terms,
                 const MilpModel& m) {
  bool first = true;
  int on_line = 0;
  for (const auto& [j, c] : terms) {
    if (first) {
      if (c < 0) out << "- ";
      first = false;
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    double a = std::abs(c);
    if (a != 1.0) out << num(a) << " ";
    out << m.var_names[j];
    if (++on_line % 8 == 0) out << "\n   ";
  }
  if (first) out << "0 " << (m.num_vars() > 0 ? m.var_names[0] : "x0");
}

}  // namespace

void export_lp(const MilpModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write LP file: " + path);
  out << (m.sense == ObjSense::maximize ? "Maximize\n" : "Minimize\n");
  out << " obj: ";
  std::vector<std::pair<int, double>> obj_terms;
  for (int j = 0; j < m.num_vars(); ++j) {
    if (m.objective[j] != 0.0) obj_terms.push_back({j, m.objective[j]});
  }
  if (obj_terms.empty() && m.num_vars() > 0) obj_terms.push_back({0, 0.0});
  write_terms(out, obj_terms, m);
  out << "\nSubject To\n";
  for (int r = 0; r < m.num_rows(); ++r) {
    out << " c" << r << ": ";
    std::vector<std::pair<int, double>> terms;
    for (std::size_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k) {
      terms.push_back({m.col[k], m.coef[k]});
    }
    write_terms(out, terms, m);
    switch (m.row_sense[r]) {
      case RowSense::le: out << " <= "; break;
      case RowSense::ge: out << " >= "; break;
      case RowSense::eq: out << " = "; break;
    }
    out << num(m.rhs[r]) << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < m.num_vars(); ++j) {
    out << " " << num(m.lower[j]) << " <= " << m.var_names[j] << " <= " << num(m.upper[j])
        << "\n";
  }
  bool any_bin = false;
  for (int j = 0; j < m.num_vars(); ++j) {
    if (m.var_kind[j] == VarKind::binary) { any_bin = true; break; }
  }
  if (any_bin) {
    out << "Binaries\n";
    int on_line = 0;
    for (int j = 0; j < m.num_vars(); ++j) {
      if (m.var_kind[j] != VarKind::binary) continue;
      out << " " << m.var_names[j];
      if (++on_line % 10 == 0) out << "\n";
    }
    out << "\n";
  }
  out << "End\n";
}

namespace {

struct Tokenizer {
  std::vector<std::string> tokens;
  std::size_t pos = 0;

  explicit Tokenizer(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '\\') continue;  // comment
      std::string tok;
      for (char ch : line) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
          if (!tok.empty()) { tokens.push_back(tok); tok.clear(); }
        } else if (ch == ':' || ch == '+' || ch == '-' || ch == '<' || ch == '>' || ch == '=') {
          // punctuation splits; "<=" and ">=" re-fuse below
          if (!tok.empty()) { tokens.push_back(tok); tok.clear(); }
          tokens.push_back(std::string(1, ch));
        } else {
          tok += ch;
        }
      }
      if (!tok.empty()) tokens.push_back(tok);
    }
    // fuse <= and >=
    std::vector<std::string> fused;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if ((tokens[i] == "<" || tokens[i] == ">") && i + 1 < tokens.size() &&
          tokens[i + 1] == "=") {
        fused.push_back(tokens[i] + "=");
        ++i;
      } else {
        fused.push_back(tokens[i]);
      }
    }
    tokens = std::move(fused);
  }

  bool done() const { return pos >= tokens.size(); }
  const std::string& peek() const { return tokens[pos]; }
  std::string next() { return tokens[pos++]; }
  bool accept(const std::string& t) {
    if (!done() && tokens[pos] == t) { ++pos; return true; }
    return false;
  }
};

bool is_number(const std::string& t) {
  if (t.empty()) return false;
  char c = t[0];
  return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
}

bool is_keyword(const std::string& t) {
  return t == "Maximize" || t == "Minimize" || t == "Subject" || t == "Bounds" ||
         t == "Binaries" || t == "Binary" || t == "End" || t == "General" || t == "Generals";
}

}  // namespace

MilpModel parse_lp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read LP file: " + path);
  Tokenizer tz(in);
  MilpModel m;
  std::map<std::string, int> var_of;
  auto var_index = [&](const std::string& name) {
    auto it = var_of.find(name);
    if (it != var_of.end()) return it->second;
    int j = m.add_continuous(name, -1e30, 1e30);  // bounds refined later
    var_of[name] = j;
    return j;
  };

  if (tz.accept("Maximize")) m.sense = ObjSense::maximize;
  else if (tz.accept("Minimize")) m.sense = ObjSense::minimize;
  else throw std::runtime_error("LP parse: expected Maximize/Minimize");

  // expression parser shared by objective and rows
  auto parse_expr = [&](std::vector<std::pair<int, double>>& terms) {
    double sign = 1.0;
    while (!tz.done()) {
      const std::string& t = tz.peek();
      if (t == "+") { tz.next(); sign = 1.0; continue; }
      if (t == "-") { tz.next(); sign = -sign; continue; }
      if (t == "<=" || t == ">=" || t == "=" || is_keyword(t)) break;
      // lookahead for "name :" row labels
      if (tz.pos + 1 < tz.tokens.size() && tz.tokens[tz.pos + 1] == ":") break;
      double coef = 1.0;
      if (is_number(t)) {
        coef = std::stod(tz.next());
        if (tz.done() || is_keyword(tz.peek()) || tz.peek() == "<=" || tz.peek() == ">=" ||
            tz.peek() == "=") {
          // bare number: push back as rhs handled by caller
          --tz.pos;
          break;
        }
      }
      std::string name = tz.next();
      terms.push_back({var_index(name), sign * coef});
      sign = 1.0;
    }
  };

  // objective: "obj :" optional label
  if (!tz.done() && tz.pos + 1 < tz.tokens.size() && tz.tokens[tz.pos + 1] == ":") {
    tz.next();
    tz.next();
  }
  std::vector<std::pair<int, double>> obj_terms;
  parse_expr(obj_terms);
  if (!(tz.accept("Subject") && tz.accept("To"))) {
    throw std::runtime_error("LP parse: expected Subject To");
  }

  std::vector<std::tuple<std::vector<std::pair<int, double>>, RowSense, double>> rows;
  while (!tz.done() && !is_keyword(tz.peek())) {
    if (tz.pos + 1 < tz.tokens.size() && tz.tokens[tz.pos + 1] == ":") {
      tz.next();
      tz.next();
    }
    std::vector<std::pair<int, double>> terms;
    parse_expr(terms);
    std::string op = tz.next();
    RowSense sense;
    if (op == "<=") sense = RowSense::le;
    else if (op == ">=") sense = RowSense::ge;
    else if (op == "=") sense = RowSense::eq;
    else throw std::runtime_error("LP parse: bad row sense " + op);
    double sign = 1.0;
    if (tz.accept("-")) sign = -1.0;
    else tz.accept("+");
    double b = sign * std::stod(tz.next());
    rows.push_back({std::move(terms), sense, b});
  }

  if (tz.accept("Bounds")) {
    while (!tz.done() && !is_keyword(tz.peek())) {
      // forms: "l <= x <= u" | "x <= u" | "x >= l" | "x = v"
      double sign = 1.0;
      if (tz.accept("-")) sign = -1.0;
      if (is_number(tz.peek())) {
        double lo = sign * std::stod(tz.next());
        if (!tz.accept("<=")) throw std::runtime_error("LP parse: bad bound line");
        int j = var_index(tz.next());
        m.lower[j] = lo;
        if (tz.accept("<=")) {
          double s2 = tz.accept("-") ? -1.0 : 1.0;
          m.upper[j] = s2 * std::stod(tz.next());
        }
      } else {
        int j = var_index(tz.next());
        std::string op = tz.next();
        double s2 = tz.accept("-") ? -1.0 : 1.0;
        double v = s2 * std::stod(tz.next());
        if (op == "<=") m.upper[j] = v;
        else if (op == ">=") m.lower[j] = v;
        else if (op == "=") { m.lower[j] = v; m.upper[j] = v; }
        else throw std::runtime_error("LP parse: bad bound op " + op);
      }
    }
  }
  if (tz.accept("Binaries") || tz.accept("Binary")) {
    while (!tz.done() && !is_keyword(tz.peek())) {
      int j = var_index(tz.next());
      m.var_kind[j] = VarKind::binary;
      if (m.lower[j] < 0.0) m.lower[j] = 0.0;
      if (m.upper[j] > 1.0) m.upper[j] = 1.0;
    }
  }
  if (tz.accept("General") || tz.accept("Generals")) {
    throw std::runtime_error("LP parse: general integers unsupported");
  }
  tz.accept("End");

  for (const auto& [j, c] : obj_terms) m.objective[j] += c;
  for (auto& [terms, sense, b] : rows) m.add_row(std::move(terms), sense, b);
  return m;
}

}  // namespace tdscw::milp
