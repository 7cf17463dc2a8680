#include "remodel/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace remodel {

namespace {

struct Sexp {
  bool is_list = false;
  std::string sym;
  std::vector<Sexp> items;
  int line = 1;
  int col = 1;

  bool is_sym(const std::string& s) const { return !is_list && sym == s; }
  bool head_is(const std::string& s) const {
    return is_list && !items.empty() && items[0].is_sym(s);
  }
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Sexp> parse_all() {
    std::vector<Sexp> out;
    skip_ws();
    while (pos_ < text_.size()) {
      out.push_back(parse_one());
      skip_ws();
    }
    return out;
  }

 private:
  Sexp parse_one() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
    Sexp node;
    node.line = line_;
    node.col = col_;
    const char c = text_[pos_];
    if (c == '(') {
      advance();
      node.is_list = true;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        node.items.push_back(parse_one());
        skip_ws();
      }
      if (pos_ >= text_.size()) throw ParseError("missing ')'", node.line, node.col);
      advance();  // ')'
      return node;
    }
    if (c == ')') throw ParseError("unexpected ')'", line_, col_);
    std::string sym;
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      sym.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(d))));
      advance();
    }
    node.sym = std::move(sym);
    return node;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// "a b - t c - u" -> [(a,t),(b,t),(c,object)]
std::vector<std::pair<std::string, std::string>> parse_typed_list(
    const std::vector<Sexp>& items, std::size_t begin, std::size_t end) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < end; ++i) {
    const Sexp& it = items[i];
    if (it.is_list) throw ParseError("expected a name in typed list", it.line, it.col);
    if (it.sym == "-") {
      if (i + 1 >= end)
        throw ParseError("dangling '-' in typed list", it.line, it.col);
      const Sexp& type = items[i + 1];
      if (type.is_list) throw ParseError("expected a type name", type.line, type.col);
      for (auto& name : pending) out.emplace_back(std::move(name), type.sym);
      pending.clear();
      ++i;
    } else {
      pending.push_back(it.sym);
    }
  }
  for (auto& name : pending) out.emplace_back(std::move(name), "object");
  return out;
}

const Sexp* find_section(const Sexp& define, const std::string& keyword) {
  for (std::size_t i = 2; i < define.items.size(); ++i) {
    if (define.items[i].head_is(keyword)) return &define.items[i];
  }
  return nullptr;
}

struct Literal {
  bool negated = false;
  const Sexp* atom = nullptr;
};

void collect_literals(const Sexp& node, std::vector<Literal>& out, bool allow_negated) {
  if (!node.is_list || node.items.empty())
    throw ParseError("expected a literal or (and ...)", node.line, node.col);
  if (node.items[0].is_sym("and")) {
    for (std::size_t i = 1; i < node.items.size(); ++i)
      collect_literals(node.items[i], out, allow_negated);
    return;
  }
  if (node.items[0].is_sym("not")) {
    if (!allow_negated)
      throw UnsupportedFeatureError("(not ...) outside the supported subset here");
    if (node.items.size() != 2 || !node.items[1].is_list)
      throw ParseError("(not ...) must wrap one atom", node.line, node.col);
    const Sexp& atom = node.items[1];
    if (atom.items.empty() || atom.items[0].is_list ||
        atom.items[0].is_sym("and") || atom.items[0].is_sym("not") ||
        atom.items[0].is_sym("or"))
      throw ParseError("(not ...) must wrap one atom", atom.line, atom.col);
    out.push_back({true, &atom});
    return;
  }
  for (const char* kw : {"or", "imply", "exists", "forall", "when", "increase", "="}) {
    if (node.items[0].is_sym(kw)) throw UnsupportedFeatureError(kw);
  }
  out.push_back({false, &node});
}

GroundAtom resolve_ground_atom(const Sexp& atom, const Vocabulary& vocab,
                               const GroundContext& ctx) {
  if (!atom.is_list || atom.items.empty() || atom.items[0].is_list)
    throw ParseError("expected (predicate object...)", atom.line, atom.col);
  GroundAtom out;
  out.predicate = vocab.predicate_index(atom.items[0].sym);
  if (out.predicate < 0)
    throw VocabularyError("undeclared predicate: " + atom.items[0].sym);
  const auto& sig = vocab.predicates()[static_cast<std::size_t>(out.predicate)];
  if (atom.items.size() - 1 != sig.parameter_types.size())
    throw VocabularyError("arity mismatch for predicate: " + sig.name);
  for (std::size_t i = 1; i < atom.items.size(); ++i) {
    const int oid = ctx.object_id(atom.items[i].sym);
    if (oid < 0) throw VocabularyError("undeclared object: " + atom.items[i].sym);
    out.objects.push_back(oid);
  }
  return out;
}

}  // namespace

DomainModel parse_domain(const std::string& text) {
  Lexer lexer(text);
  const auto forms = lexer.parse_all();
  if (forms.size() != 1 || !forms[0].head_is("define"))
    throw ParseError("expected a single (define (domain ...)) form", 1, 1);
  const Sexp& define = forms[0];
  if (define.items.size() < 2 || !define.items[1].head_is("domain") ||
      define.items[1].items.size() != 2)
    throw ParseError("expected (domain <name>)", define.line, define.col);
  const std::string domain_name = define.items[1].items[1].sym;

  static const std::set<std::string> kSupported = {":strips", ":typing",
                                                   ":negative-preconditions"};
  static const std::set<std::string> kSections = {":requirements", ":types",
                                                  ":predicates", ":action"};
  if (const Sexp* reqs = find_section(define, ":requirements")) {
    for (std::size_t i = 1; i < reqs->items.size(); ++i) {
      if (!kSupported.count(reqs->items[i].sym))
        throw UnsupportedFeatureError(reqs->items[i].sym);
    }
  }
  for (std::size_t i = 2; i < define.items.size(); ++i) {
    const Sexp& sec = define.items[i];
    if (!sec.is_list || sec.items.empty() || sec.items[0].is_list)
      throw ParseError("expected a domain section", sec.line, sec.col);
    if (!kSections.count(sec.items[0].sym))
      throw UnsupportedFeatureError(sec.items[0].sym);
  }

  std::map<std::string, std::string> type_parents;
  if (const Sexp* types = find_section(define, ":types")) {
    for (auto& [child, parent] : parse_typed_list(types->items, 1, types->items.size())) {
      type_parents[child] = parent;
    }
  }
  type_parents.erase("object");

  std::vector<PredicateSignature> predicates;
  if (const Sexp* preds = find_section(define, ":predicates")) {
    for (std::size_t i = 1; i < preds->items.size(); ++i) {
      const Sexp& p = preds->items[i];
      if (!p.is_list || p.items.empty() || p.items[0].is_list)
        throw ParseError("expected (predicate ?a - type ...)", p.line, p.col);
      PredicateSignature sig;
      sig.name = p.items[0].sym;
      for (auto& [var, type] : parse_typed_list(p.items, 1, p.items.size())) {
        (void)var;
        sig.parameter_types.push_back(type);
      }
      predicates.push_back(std::move(sig));
    }
  }

  struct ParsedAction {
    ActionSignature sig;
    std::vector<Literal> pre;
    std::vector<Literal> eff;
  };
  std::vector<ParsedAction> parsed_actions;
  for (std::size_t i = 2; i < define.items.size(); ++i) {
    const Sexp& sec = define.items[i];
    if (!sec.head_is(":action")) continue;
    if (sec.items.size() < 2 || sec.items[1].is_list)
      throw ParseError("expected (:action <name> ...)", sec.line, sec.col);
    ParsedAction pa;
    pa.sig.name = sec.items[1].sym;
    for (std::size_t j = 2; j + 1 < sec.items.size(); j += 2) {
      const Sexp& key = sec.items[j];
      const Sexp& value = sec.items[j + 1];
      if (key.is_sym(":parameters")) {
        if (!value.is_list) throw ParseError("expected a parameter list", value.line, value.col);
        for (auto& [var, type] : parse_typed_list(value.items, 0, value.items.size())) {
          if (var.empty() || var[0] != '?')
            throw ParseError("action parameters must start with '?'", value.line, value.col);
          pa.sig.parameter_names.push_back(var.substr(1));
          pa.sig.parameter_types.push_back(type);
        }
      } else if (key.is_sym(":precondition")) {
        collect_literals(value, pa.pre, /*allow_negated=*/true);
      } else if (key.is_sym(":effect")) {
        collect_literals(value, pa.eff, /*allow_negated=*/true);
      } else if (!key.is_list) {
        throw UnsupportedFeatureError(key.sym);
      } else {
        throw ParseError("expected :parameters/:precondition/:effect", key.line, key.col);
      }
    }
    parsed_actions.push_back(std::move(pa));
  }

  std::vector<ActionSignature> signatures;
  signatures.reserve(parsed_actions.size());
  for (const auto& pa : parsed_actions) signatures.push_back(pa.sig);

  // Every mentioned type gets an explicit parent so that printing and
  // re-parsing normalize to the same hierarchy.
  auto note_type = [&](const std::string& t) {
    if (t != "object") type_parents.try_emplace(t, "object");
  };
  for (const auto& [child, parent] : std::map<std::string, std::string>(type_parents)) {
    note_type(child);
    note_type(parent);
  }
  for (const auto& sig : predicates)
    for (const auto& t : sig.parameter_types) note_type(t);
  for (const auto& sig : signatures)
    for (const auto& t : sig.parameter_types) note_type(t);

  auto vocab = std::make_shared<Vocabulary>(predicates, signatures, type_parents);

  std::vector<Mode> modes(static_cast<std::size_t>(vocab->n_pals()), Mode::Absent);
  for (const auto& pa : parsed_actions) {
    const int action = vocab->action_index(pa.sig.name);
    std::map<std::string, int> param_of;
    for (std::size_t k = 0; k < pa.sig.parameter_names.size(); ++k)
      param_of[pa.sig.parameter_names[k]] = static_cast<int>(k);
    auto set_literal = [&](const Literal& lit, Location loc) {
      const Sexp& atom = *lit.atom;
      PalTuple pal;
      pal.action = action;
      pal.location = loc;
      pal.atom.predicate = vocab->predicate_index(atom.items[0].sym);
      if (pal.atom.predicate < 0)
        throw VocabularyError("undeclared predicate: " + atom.items[0].sym);
      for (std::size_t k = 1; k < atom.items.size(); ++k) {
        const std::string& sym = atom.items[k].sym;
        if (sym.empty() || sym[0] != '?')
          throw UnsupportedFeatureError("constants in action bodies");
        auto it = param_of.find(sym.substr(1));
        if (it == param_of.end())
          throw VocabularyError("unbound parameter " + sym + " in action " + pa.sig.name);
        pal.atom.binding.push_back(it->second);
      }
      const int id = vocab->pal_index(pal);
      if (id < 0)
        throw VocabularyError("ill-typed literal for predicate " + atom.items[0].sym +
                              " in action " + pa.sig.name);
      const Mode m = lit.negated ? Mode::Minus : Mode::Plus;
      Mode& slot = modes[static_cast<std::size_t>(id)];
      if (slot != Mode::Absent && slot != m)
        throw IllegalModeError("conflicting literals at: " + vocab->pal_text(id));
      slot = m;
    };
    for (const auto& lit : pa.pre) set_literal(lit, Location::Pre);
    for (const auto& lit : pa.eff) set_literal(lit, Location::Eff);
  }

  (void)domain_name;
  return DomainModel(std::move(vocab), std::move(modes));
}

namespace {

std::string atom_to_pddl(const Vocabulary& vocab, const PalTuple& pal) {
  const auto& act = vocab.actions()[static_cast<std::size_t>(pal.action)];
  const auto& pred = vocab.predicates()[static_cast<std::size_t>(pal.atom.predicate)];
  std::ostringstream os;
  os << '(' << pred.name;
  for (int par : pal.atom.binding)
    os << " ?" << act.parameter_names[static_cast<std::size_t>(par)];
  os << ')';
  return os.str();
}

}  // namespace

std::string print_domain(const DomainModel& m) {
  if (!m.concrete())
    throw AbstractModelError("abstract models have no PDDL form; use the pal dump");
  const Vocabulary& vocab = m.vocab();
  std::ostringstream os;
  os << "(define (domain generated)\n";
  bool negative_pre = false;
  for (int pal = 0; pal < vocab.n_pals(); ++pal) {
    if (Vocabulary::location_of(pal) == Location::Pre && m.mode(pal) == Mode::Minus)
      negative_pre = true;
  }
  os << "  (:requirements :strips :typing";
  if (negative_pre) os << " :negative-preconditions";
  os << ")\n";

  std::set<std::string> types;
  for (const auto& p : vocab.predicates())
    for (const auto& t : p.parameter_types) types.insert(t);
  for (const auto& a : vocab.actions())
    for (const auto& t : a.parameter_types) types.insert(t);
  for (const auto& [child, parent] : vocab.type_parents()) {
    types.insert(child);
    types.insert(parent);
  }
  types.erase("object");
  if (!types.empty()) {
    // Explicit parents keep the typed list unambiguous under re-parsing.
    os << "  (:types";
    for (const auto& t : types) {
      os << ' ' << t << " - ";
      auto it = vocab.type_parents().find(t);
      os << (it != vocab.type_parents().end() ? it->second : "object");
    }
    os << ")\n";
  }

  os << "  (:predicates";
  for (const auto& p : vocab.predicates()) {
    os << "\n    (" << p.name;
    for (std::size_t i = 0; i < p.parameter_types.size(); ++i)
      os << " ?x" << i << " - " << p.parameter_types[i];
    os << ')';
  }
  os << ")\n";

  for (int ai = 0; ai < static_cast<int>(vocab.actions().size()); ++ai) {
    const auto& act = vocab.actions()[static_cast<std::size_t>(ai)];
    os << "  (:action " << act.name << "\n    :parameters (";
    for (std::size_t i = 0; i < act.parameter_names.size(); ++i) {
      if (i) os << ' ';
      os << '?' << act.parameter_names[i] << " - " << act.parameter_types[i];
    }
    os << ")\n";
    auto write_block = [&](const char* label, Location loc) {
      os << "    " << label << " (and";
      for (int pal : vocab.pals_of_action(ai)) {
        if (Vocabulary::location_of(pal) != loc) continue;
        const Mode mode = m.mode(pal);
        if (mode == Mode::Absent) continue;
        const PalTuple& p = vocab.pal_tuples()[static_cast<std::size_t>(pal)];
        os << ' ';
        if (mode == Mode::Minus) os << "(not " << atom_to_pddl(vocab, p) << ')';
        else os << atom_to_pddl(vocab, p);
      }
      os << ")\n";
    };
    write_block(":precondition", Location::Pre);
    write_block(":effect", Location::Eff);
    os << "  )\n";
  }
  os << ")\n";
  return os.str();
}

ProblemInstance parse_problem(const std::string& text, const DomainModel& m) {
  Lexer lexer(text);
  const auto forms = lexer.parse_all();
  if (forms.size() != 1 || !forms[0].head_is("define"))
    throw ParseError("expected a single (define (problem ...)) form", 1, 1);
  const Sexp& define = forms[0];
  if (define.items.size() < 2 || !define.items[1].head_is("problem") ||
      define.items[1].items.size() != 2)
    throw ParseError("expected (problem <name>)", define.line, define.col);

  ProblemInstance out;
  out.name = define.items[1].items[1].sym;

  std::vector<std::pair<std::string, std::string>> objects;
  if (const Sexp* objs = find_section(define, ":objects")) {
    objects = parse_typed_list(objs->items, 1, objs->items.size());
  }
  auto ctx = std::make_shared<GroundContext>(m.vocab_ptr(), std::move(objects));
  out.ctx = ctx;
  out.init = ctx->empty_state();

  if (const Sexp* init = find_section(define, ":init")) {
    for (std::size_t i = 1; i < init->items.size(); ++i) {
      const GroundAtom atom = resolve_ground_atom(init->items[i], m.vocab(), *ctx);
      out.init.set(ctx->atom_id(atom), true);
    }
  }
  if (const Sexp* goal = find_section(define, ":goal")) {
    if (goal->items.size() != 2)
      throw ParseError("expected (:goal <condition>)", goal->line, goal->col);
    std::vector<Literal> literals;
    collect_literals(goal->items[1], literals, /*allow_negated=*/true);
    for (const auto& lit : literals) {
      const GroundAtom atom = resolve_ground_atom(*lit.atom, m.vocab(), *ctx);
      const int id = ctx->atom_id(atom);
      (lit.negated ? out.goal.negative : out.goal.positive).push_back(id);
    }
  }
  return out;
}

namespace {

ObservationTrace read_trace_forms(const std::vector<Sexp>& forms,
                                  const std::shared_ptr<const Vocabulary>& vocab,
                                  std::shared_ptr<const GroundContext> expected_ctx) {
  if (forms.empty() || !forms[0].head_is("objects"))
    throw ParseError("trace must start with an (objects ...) record", 1, 1);

  std::vector<std::pair<std::string, std::string>> objects;
  for (std::size_t i = 1; i < forms[0].items.size(); ++i) {
    const Sexp& entry = forms[0].items[i];
    if (!entry.is_list || entry.items.size() != 2)
      throw ParseError("expected (name type) in objects record", entry.line, entry.col);
    objects.emplace_back(entry.items[0].sym, entry.items[1].sym);
  }
  std::shared_ptr<const GroundContext> ctx;
  if (expected_ctx) {
    std::sort(objects.begin(), objects.end());
    if (objects != expected_ctx->objects())
      throw VocabularyError("trace objects do not match the provided context");
    ctx = std::move(expected_ctx);
  } else {
    ctx = std::make_shared<GroundContext>(vocab, std::move(objects));
  }

  ObservationTrace trace;
  trace.ctx = ctx;
  bool expect_state = true;
  for (std::size_t f = 1; f < forms.size(); ++f) {
    const Sexp& rec = forms[f];
    if (rec.head_is("state")) {
      if (!expect_state)
        throw ParseError("two consecutive state records", rec.line, rec.col);
      BitVec s = ctx->empty_state();
      for (std::size_t i = 1; i < rec.items.size(); ++i) {
        const GroundAtom atom = resolve_ground_atom(rec.items[i], ctx->vocab(), *ctx);
        s.set(ctx->atom_id(atom), true);
      }
      trace.states.push_back(std::move(s));
      expect_state = false;
    } else if (rec.head_is("action")) {
      if (expect_state)
        throw ParseError("two consecutive action records", rec.line, rec.col);
      if (rec.items.size() != 2 || !rec.items[1].is_list || rec.items[1].items.empty())
        throw ParseError("expected (action (name obj...))", rec.line, rec.col);
      const Sexp& ga = rec.items[1];
      const int action = ctx->vocab().action_index(ga.items[0].sym);
      if (action < 0) throw VocabularyError("undeclared action: " + ga.items[0].sym);
      std::vector<int> objs;
      for (std::size_t i = 1; i < ga.items.size(); ++i) {
        const int oid = ctx->object_id(ga.items[i].sym);
        if (oid < 0) throw VocabularyError("undeclared object: " + ga.items[i].sym);
        objs.push_back(oid);
      }
      const int gid = ctx->find_ground_action(action, objs);
      if (gid < 0)
        throw GroundingError("ill-typed ground action: " + ga.items[0].sym);
      trace.actions.push_back(gid);
      expect_state = true;
    } else {
      throw ParseError("expected a (state ...) or (action ...) record", rec.line, rec.col);
    }
  }
  if (trace.states.empty())
    throw ParseError("trace has no states", 1, 1);
  if (trace.states.size() != trace.actions.size() + 1)
    throw ParseError("trace must end with a state", 1, 1);
  return trace;
}

}  // namespace

ObservationTrace read_trace(const std::string& text,
                            const std::shared_ptr<const Vocabulary>& vocab) {
  Lexer lexer(text);
  return read_trace_forms(lexer.parse_all(), vocab, nullptr);
}

ObservationTrace read_trace(const std::string& text,
                            const std::shared_ptr<const GroundContext>& ctx) {
  Lexer lexer(text);
  return read_trace_forms(lexer.parse_all(), ctx->vocab_ptr(), ctx);
}

std::string write_trace(const ObservationTrace& trace) {
  const GroundContext& ctx = *trace.ctx;
  std::ostringstream os;
  os << "(objects";
  for (const auto& [name, type] : ctx.objects()) os << " (" << name << ' ' << type << ')';
  os << ")\n";
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    os << "(state";
    const std::string body = ctx.state_text(trace.states[i]);
    if (!body.empty()) os << ' ' << body;
    os << ")\n";
    if (i < trace.actions.size())
      os << "(action " << ctx.ground_action_text(trace.actions[i]) << ")\n";
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
}

}  // namespace remodel
