#pragma once

// Text format for multi-context systems: lexer, recursive-descent parser
// with line/column diagnostics, and a canonical serializer.
//
// Grammar sketch:
//   document := item*
//   item     := context | bridge | ic | manage | domain
//   context  := "context" NAME "kind" KIND "{" (fact | rule | axiom)* "}"
//   fact     := ATOM "." | "*" "."
//   rule     := ATOM ":-" ATOM ("," ATOM)* "."            (datalog contexts)
//   axiom    := ATOM ("," ATOM)* "=>" ["-"] ATOM "."      (closure contexts)
//   bridge   := "bridge" NAME ":" [OP "@"] NAME ":" (ATOM | "*")
//               ":-" body "."
//   ic       := "ic" ":-" body "."
//   body     := bodyLit ("," bodyLit)*
//   bodyLit  := ["not"] NAME ":" ["-"] (ATOM | "*")
//             | TERM ("=" | "!=") TERM                    (ic bodies only)
//   manage   := "manage" NAME "{" ("ops" | "keys") nameList ";" ... "}"
//   domain   := "domain" NAME ":" NAME "{" [CONST ("," CONST)*] "}"
//
// Identifiers starting with an uppercase letter are variables; lowercase
// identifiers, numbers and double-quoted strings are constants. "%" starts
// a line comment.

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mcs/kernel.hpp"
#include "mcs/logics.hpp"

namespace mcs {

struct SourcePos {
  int line = 1;
  int col = 1;
};

struct Diagnostic {
  SourcePos pos;
  std::string message;
};

inline std::string to_string(const Diagnostic& d) {
  return std::to_string(d.pos.line) + ":" + std::to_string(d.pos.col) + ": " + d.message;
}

/// A parsed system together with its constraints and name bookkeeping needed
/// for canonical re-serialization.
struct Document {
  MultiContextSystem mcs;
  std::vector<IntegrityConstraint> ics;
  std::map<std::string, int> contextIndex;
  std::map<int, std::set<std::string>> keyedPredicates;  // "keys" clauses per context
};

struct ParseResult {
  std::optional<Document> document;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return document.has_value(); }
};

// ---------------------------------------------------------------------------
// Lexer

namespace dsl {

enum class Tok {
  Ident, Number, String, Star,
  LBrace, RBrace, LParen, RParen,
  Colon, Comma, Period, Semi, At, Minus,
  Eq, Neq, Turnstile, Implies,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

class LexError : public Error {
 public:
  LexError(SourcePos pos, const std::string& msg) : Error(msg), pos(pos) {}
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string text) : text_(std::move(text)) {}

  std::vector<Token> tokens() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      bool end = t.kind == Tok::End;
      out.push_back(std::move(t));
      if (end) return out;
    }
  }

 private:
  char peek() const { return i_ < text_.size() ? text_[i_] : '\0'; }

  char advance() {
    char c = text_[i_++];
    if (c == '\n') {
      ++pos_.line;
      pos_.col = 1;
    } else {
      ++pos_.col;
    }
    return c;
  }

  Token next() {
    for (;;) {
      while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '%') {
        while (i_ < text_.size() && peek() != '\n') advance();
        continue;
      }
      break;
    }
    SourcePos start = pos_;
    if (i_ >= text_.size()) return {Tok::End, "", start};
    char c = advance();
    switch (c) {
      case '{': return {Tok::LBrace, "{", start};
      case '}': return {Tok::RBrace, "}", start};
      case '(': return {Tok::LParen, "(", start};
      case ')': return {Tok::RParen, ")", start};
      case ',': return {Tok::Comma, ",", start};
      case '.': return {Tok::Period, ".", start};
      case ';': return {Tok::Semi, ";", start};
      case '*': return {Tok::Star, "*", start};
      case '@': return {Tok::At, "@", start};
      case '-': return {Tok::Minus, "-", start};
      case ':':
        if (peek() == '-') {
          advance();
          return {Tok::Turnstile, ":-", start};
        }
        return {Tok::Colon, ":", start};
      case '=':
        if (peek() == '>') {
          advance();
          return {Tok::Implies, "=>", start};
        }
        return {Tok::Eq, "=", start};
      case '!':
        if (peek() == '=') {
          advance();
          return {Tok::Neq, "!=", start};
        }
        throw LexError(start, "unexpected '!'");
      case '"': {
        std::string s;
        while (i_ < text_.size() && peek() != '"') {
          if (peek() == '\n') throw LexError(start, "unterminated string");
          s += advance();
        }
        if (i_ >= text_.size()) throw LexError(start, "unterminated string");
        advance();  // closing quote
        return {Tok::String, std::move(s), start};
      }
      default:
        if (std::isdigit(static_cast<unsigned char>(c))) {
          std::string s(1, c);
          while (std::isdigit(static_cast<unsigned char>(peek()))) s += advance();
          return {Tok::Number, std::move(s), start};
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
          std::string s(1, c);
          while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
            s += advance();
          return {Tok::Ident, std::move(s), start};
        }
        throw LexError(start, std::string("unexpected character '") + c + "'");
    }
  }

  std::string text_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

// ---------------------------------------------------------------------------
// AST

struct AstLiteral {
  bool negated = false;      // "not" prefix
  std::string context;
  bool negativeBelief = false;  // "-" prefix on the atom
  bool star = false;
  Atom atom;
  SourcePos pos;
};

struct AstBody {
  std::vector<AstLiteral> literals;
  std::vector<std::pair<BuiltinAtom, SourcePos>> builtins;
};

struct AstBridge {
  std::string name;
  std::string op;  // empty for plain heads
  std::string headContext;
  bool headStar = false;
  Atom headAtom;
  AstBody body;
  SourcePos pos;
};

struct AstIc {
  AstBody body;
  SourcePos pos;
};

struct AstContext {
  std::string name;
  std::string kind;
  KnowledgeBase facts;
  std::vector<DatalogRule> rules;
  std::vector<HornAxiom> axioms;
  SourcePos pos;
};

struct AstManage {
  std::string context;
  std::set<std::string> ops;
  std::set<std::string> keys;
  SourcePos pos;
};

struct AstDomain {
  std::string importer;
  std::string exporter;
  std::set<std::string> constants;
  SourcePos pos;
};

struct AstDocument {
  std::vector<AstContext> contexts;
  std::vector<AstBridge> bridges;
  std::vector<AstIc> ics;
  std::vector<AstManage> manages;
  std::vector<AstDomain> domains;
};

// ---------------------------------------------------------------------------
// Parser

class ParseFail : public Error {
 public:
  ParseFail(SourcePos pos, const std::string& msg) : Error(msg), pos(pos) {}
  SourcePos pos;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  AstDocument parseDocument() {
    AstDocument doc;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind != Tok::Ident) fail(t.pos, "expected an item (context/bridge/ic/manage/domain)");
      if (t.text == "context") doc.contexts.push_back(parseContext());
      else if (t.text == "bridge") doc.bridges.push_back(parseBridge());
      else if (t.text == "ic") doc.ics.push_back(parseIc());
      else if (t.text == "manage") doc.manages.push_back(parseManage());
      else if (t.text == "domain") doc.domains.push_back(parseDomain());
      else fail(t.pos, "unknown item '" + t.text + "'");
    }
    return doc;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = i_ + ahead;
    return k < toks_.size() ? toks_[k] : toks_.back();
  }

  Token take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  [[noreturn]] void fail(SourcePos pos, const std::string& msg) { throw ParseFail(pos, msg); }

  Token expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek().pos, std::string("expected ") + what);
    return take();
  }

  std::string expectName(const char* what) {
    if (peek().kind != Tok::Ident) fail(peek().pos, std::string("expected ") + what);
    return take().text;
  }

  std::string expectKeyword(const char* kw) {
    if (peek().kind != Tok::Ident || peek().text != kw)
      fail(peek().pos, std::string("expected '") + kw + "'");
    return take().text;
  }

  Term parseTerm() {
    const Token& t = peek();
    if (t.kind == Tok::Number || t.kind == Tok::String) return Term::constant(take().text);
    if (t.kind == Tok::Ident) {
      std::string name = take().text;
      if (std::isupper(static_cast<unsigned char>(name[0]))) return Term::variable(name);
      return Term::constant(name);
    }
    fail(t.pos, "expected a term");
  }

  Atom parseAtom() {
    Atom a;
    a.predicate = expectName("a predicate name");
    if (peek().kind == Tok::LParen) {
      take();
      for (;;) {
        a.args.push_back(parseTerm());
        if (peek().kind == Tok::Comma) {
          take();
          continue;
        }
        break;
      }
      expect(Tok::RParen, "')'");
    }
    return a;
  }

  AstContext parseContext() {
    AstContext ctx;
    ctx.pos = peek().pos;
    expectKeyword("context");
    ctx.name = expectName("a context name");
    expectKeyword("kind");
    ctx.kind = expectName("a logic kind");
    expect(Tok::LBrace, "'{'");
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::Star) {
        take();
        expect(Tok::Period, "'.'");
        ctx.facts.insert(KBElement::ordinaryToken(kFlagToken));
        continue;
      }
      SourcePos entryPos = peek().pos;
      Atom first = parseAtom();
      if (peek().kind == Tok::Period) {
        take();
        ctx.facts.insert(KBElement::relational(std::move(first)));
      } else if (peek().kind == Tok::Turnstile) {
        take();
        DatalogRule r;
        r.head = std::move(first);
        for (;;) {
          r.body.push_back(parseAtom());
          if (peek().kind == Tok::Comma) {
            take();
            continue;
          }
          break;
        }
        expect(Tok::Period, "'.'");
        ctx.rules.push_back(std::move(r));
      } else if (peek().kind == Tok::Comma || peek().kind == Tok::Implies) {
        HornAxiom ax;
        ax.body.push_back(std::move(first));
        while (peek().kind == Tok::Comma) {
          take();
          ax.body.push_back(parseAtom());
        }
        expect(Tok::Implies, "'=>'");
        if (peek().kind == Tok::Minus) {
          take();
          ax.negativeHead = true;
        }
        ax.head = parseAtom();
        expect(Tok::Period, "'.'");
        ctx.axioms.push_back(std::move(ax));
      } else {
        fail(entryPos, "expected '.', ':-' or '=>' after atom");
      }
    }
    take();  // '}'
    return ctx;
  }

  AstBody parseBody(bool builtinsAllowed) {
    AstBody body;
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::Number || t.kind == Tok::String ||
          (t.kind == Tok::Ident && t.text != "not" &&
           (peek(1).kind == Tok::Eq || peek(1).kind == Tok::Neq))) {
        SourcePos pos = t.pos;
        BuiltinAtom b;
        b.lhs = parseTerm();
        if (peek().kind == Tok::Eq) b.equal = true;
        else if (peek().kind == Tok::Neq) b.equal = false;
        else fail(peek().pos, "expected '=' or '!='");
        take();
        b.rhs = parseTerm();
        if (!builtinsAllowed) fail(pos, "comparison atoms are only allowed in ic bodies");
        body.builtins.emplace_back(std::move(b), pos);
      } else {
        AstLiteral lit;
        lit.pos = t.pos;
        if (t.kind == Tok::Ident && t.text == "not") {
          take();
          lit.negated = true;
        }
        lit.context = expectName("a context name");
        expect(Tok::Colon, "':'");
        if (peek().kind == Tok::Minus) {
          take();
          lit.negativeBelief = true;
        }
        if (peek().kind == Tok::Star) {
          take();
          lit.star = true;
          if (lit.negativeBelief) fail(lit.pos, "'-' cannot apply to '*'");
        } else {
          lit.atom = parseAtom();
        }
        body.literals.push_back(std::move(lit));
      }
      if (peek().kind == Tok::Comma) {
        take();
        continue;
      }
      break;
    }
    return body;
  }

  AstBridge parseBridge() {
    AstBridge br;
    br.pos = peek().pos;
    expectKeyword("bridge");
    br.name = expectName("a rule name");
    expect(Tok::Colon, "':'");
    std::string first = expectName("a context name");
    if (peek().kind == Tok::At) {
      take();
      br.op = std::move(first);
      br.headContext = expectName("a context name");
    } else {
      br.headContext = std::move(first);
    }
    expect(Tok::Colon, "':'");
    if (peek().kind == Tok::Star) {
      take();
      br.headStar = true;
    } else {
      br.headAtom = parseAtom();
    }
    expect(Tok::Turnstile, "':-'");
    br.body = parseBody(/*builtinsAllowed=*/false);
    expect(Tok::Period, "'.'");
    return br;
  }

  AstIc parseIc() {
    AstIc ic;
    ic.pos = peek().pos;
    expectKeyword("ic");
    expect(Tok::Turnstile, "':-'");
    ic.body = parseBody(/*builtinsAllowed=*/true);
    expect(Tok::Period, "'.'");
    return ic;
  }

  AstManage parseManage() {
    AstManage mg;
    mg.pos = peek().pos;
    expectKeyword("manage");
    mg.context = expectName("a context name");
    expect(Tok::LBrace, "'{'");
    while (peek().kind != Tok::RBrace) {
      std::string section = expectName("'ops' or 'keys'");
      std::set<std::string>* target = nullptr;
      if (section == "ops") target = &mg.ops;
      else if (section == "keys") target = &mg.keys;
      else fail(peek().pos, "expected 'ops' or 'keys', got '" + section + "'");
      for (;;) {
        target->insert(expectName("a name"));
        if (peek().kind == Tok::Comma) {
          take();
          continue;
        }
        break;
      }
      expect(Tok::Semi, "';'");
    }
    take();  // '}'
    return mg;
  }

  AstDomain parseDomain() {
    AstDomain d;
    d.pos = peek().pos;
    expectKeyword("domain");
    d.importer = expectName("a context name");
    expect(Tok::Colon, "':'");
    d.exporter = expectName("a context name");
    expect(Tok::LBrace, "'{'");
    if (peek().kind != Tok::RBrace) {
      for (;;) {
        const Token& t = peek();
        if (t.kind != Tok::Ident && t.kind != Tok::Number && t.kind != Tok::String)
          fail(t.pos, "expected a constant");
        d.constants.insert(take().text);
        if (peek().kind == Tok::Comma) {
          take();
          continue;
        }
        break;
      }
    }
    expect(Tok::RBrace, "'}'");
    return d;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace dsl

// ---------------------------------------------------------------------------
// Building a Document from the AST

namespace detail {

inline void collect_doc_constants(const dsl::AstDocument& ast, std::set<std::string>& out) {
  auto fromAtom = [&out](const Atom& a) { collect_constants(a, out); };
  for (const auto& c : ast.contexts) {
    for (const auto& e : c.facts)
      if (!e.ordinary) fromAtom(e.atom);
    for (const auto& r : c.rules) {
      fromAtom(r.head);
      for (const auto& b : r.body) fromAtom(b);
    }
    for (const auto& ax : c.axioms) {
      fromAtom(ax.head);
      for (const auto& b : ax.body) fromAtom(b);
    }
  }
  for (const auto& br : ast.bridges) {
    if (!br.headStar) fromAtom(br.headAtom);
    for (const auto& lit : br.body.literals)
      if (!lit.star) fromAtom(lit.atom);
  }
  for (const auto& ic : ast.ics) {
    for (const auto& lit : ic.body.literals)
      if (!lit.star) fromAtom(lit.atom);
    for (const auto& [b, pos] : ic.body.builtins)
      for (const Term* t : {&b.lhs, &b.rhs})
        if (t->isConstant()) out.insert(t->name);
  }
  for (const auto& d : ast.domains) out.insert(d.constants.begin(), d.constants.end());
}

}  // namespace detail

/// Parse a system description. On success the document holds a system that
/// passed structural validation; otherwise `diagnostics` explains why not.
inline ParseResult parse(const std::string& text) {
  ParseResult result;
  auto diag = [&result](SourcePos pos, std::string msg) {
    result.diagnostics.push_back({pos, std::move(msg)});
  };

  dsl::AstDocument ast;
  try {
    dsl::Lexer lexer(text);
    dsl::Parser parser(lexer.tokens());
    ast = parser.parseDocument();
  } catch (const dsl::LexError& e) {
    diag(e.pos, e.what());
    return result;
  } catch (const dsl::ParseFail& e) {
    diag(e.pos, e.what());
    return result;
  }

  Document doc;
  std::map<std::string, int>& index = doc.contextIndex;
  for (const auto& c : ast.contexts) {
    if (index.count(c.name)) {
      diag(c.pos, "duplicate context '" + c.name + "'");
      continue;
    }
    index[c.name] = static_cast<int>(doc.mcs.contexts.size());
    Context ctx;
    ctx.name = c.name;
    doc.mcs.contexts.push_back(std::move(ctx));
  }
  auto resolve = [&](const std::string& name, SourcePos pos) -> int {
    auto it = index.find(name);
    if (it == index.end()) {
      diag(pos, "unknown context '" + name + "'");
      return -1;
    }
    return it->second;
  };

  std::set<std::string> universe;
  detail::collect_doc_constants(ast, universe);

  // signatures first: facts and bridge heads declare kb predicates, local
  // rule/axiom heads and bodies declare belief predicates
  std::vector<Signature> sigs(doc.mcs.contexts.size());
  for (std::size_t i = 0; i < ast.contexts.size(); ++i) {
    const auto& c = ast.contexts[i];
    auto it = index.find(c.name);
    if (it == index.end()) continue;
    Signature& sig = sigs[static_cast<std::size_t>(it->second)];
    sig.universe = universe;
    for (const auto& e : c.facts)
      if (!e.ordinary) sig.declareKb(e.atom.predicate, e.atom.arity());
    for (const auto& r : c.rules) {
      sig.declareBelief(r.head.predicate, r.head.arity());
      for (const auto& b : r.body) sig.declareBelief(b.predicate, b.arity());
    }
    for (const auto& ax : c.axioms) {
      sig.declareBelief(ax.head.predicate, ax.head.arity());
      for (const auto& b : ax.body) sig.declareBelief(b.predicate, b.arity());
    }
  }
  auto declareQueried = [&](const dsl::AstBody& body) {
    for (const auto& lit : body.literals) {
      auto it = index.find(lit.context);
      if (it == index.end() || lit.star) continue;
      sigs[static_cast<std::size_t>(it->second)].declareBelief(lit.atom.predicate,
                                                              lit.atom.arity());
    }
  };
  for (const auto& br : ast.bridges) {
    declareQueried(br.body);
    auto it = index.find(br.headContext);  // unknown names reported later
    if (it == index.end()) continue;
    if (!br.headStar)
      sigs[static_cast<std::size_t>(it->second)].declareKb(br.headAtom.predicate,
                                                           br.headAtom.arity());
  }
  for (const auto& ic : ast.ics) declareQueried(ic.body);

  // a db context's belief vocabulary is exactly its relation vocabulary, so
  // predicates it is queried about (or receives through bridge heads) are kb
  // relations even when it currently stores no tuples of them
  for (const auto& c : ast.contexts) {
    if (c.kind != "db") continue;
    auto it = index.find(c.name);
    if (it == index.end()) continue;
    Signature& sig = sigs[static_cast<std::size_t>(it->second)];
    for (const auto& [pred, arities] : sig.beliefPredicates)
      for (int arity : arities) sig.declareKb(pred, arity);
  }

  for (const auto& c : ast.contexts) {
    auto it = index.find(c.name);
    if (it == index.end()) continue;
    Context& ctx = doc.mcs.contexts[static_cast<std::size_t>(it->second)];
    ctx.kb = c.facts;
    if (!LogicRegistry::instance().known(c.kind)) {
      diag(c.pos, "unknown logic kind '" + c.kind + "'");
      continue;
    }
    if (c.kind == "db" && (!c.rules.empty() || !c.axioms.empty()))
      diag(c.pos, "db context '" + c.name + "' cannot contain rules or axioms");
    if (c.kind == "datalog" && !c.axioms.empty())
      diag(c.pos, "datalog context '" + c.name + "' cannot contain axioms");
    if (c.kind == "closure" && !c.rules.empty())
      diag(c.pos, "closure context '" + c.name + "' cannot contain ':-' rules");
    try {
      ctx.logic = LogicRegistry::instance().make(
          c.kind, c.rules, c.axioms, sigs[static_cast<std::size_t>(it->second)]);
    } catch (const Error& e) {
      diag(c.pos, e.what());
    }
  }

  auto buildLiteral = [&](const dsl::AstLiteral& lit,
                          std::optional<ContextLiteral>& out) {
    int c = resolve(lit.context, lit.pos);
    if (c < 0) return;
    ContextLiteral cl;
    cl.context = c;
    cl.negated = lit.negated;
    if (lit.star) cl.belief = Belief::ordinaryToken(kFlagToken);
    else if (lit.negativeBelief) cl.belief = Belief::negative(lit.atom);
    else cl.belief = Belief::positive(lit.atom);
    out = std::move(cl);
  };

  for (const auto& br : ast.bridges) {
    int target = resolve(br.headContext, br.pos);
    if (target < 0) continue;
    BridgeRule rule;
    rule.name = br.name;
    rule.head.context = target;
    rule.head.op = br.op;
    rule.head.element = br.headStar ? KBElement::ordinaryToken(kFlagToken)
                                    : KBElement::relational(br.headAtom);
    for (const auto& lit : br.body.literals) {
      std::optional<ContextLiteral> cl;
      buildLiteral(lit, cl);
      if (cl) rule.body.push_back(std::move(*cl));
    }
    doc.mcs.contexts[static_cast<std::size_t>(target)].rules.push_back(std::move(rule));
  }

  for (const auto& ic : ast.ics) {
    IntegrityConstraint out;
    for (const auto& lit : ic.body.literals) {
      std::optional<ContextLiteral> cl;
      buildLiteral(lit, cl);
      if (!cl) continue;
      (cl->negated ? out.negative : out.positive).push_back(std::move(*cl));
    }
    for (const auto& [b, pos] : ic.body.builtins) out.builtins.push_back(b);
    doc.ics.push_back(std::move(out));
  }

  for (const auto& mg : ast.manages) {
    int c = resolve(mg.context, mg.pos);
    if (c < 0) continue;
    Context& ctx = doc.mcs.contexts[static_cast<std::size_t>(c)];
    ctx.ops = mg.ops;
    if (!mg.keys.empty()) {
      ctx.mng = make_builtin_mng(mg.keys);
      doc.keyedPredicates[c] = mg.keys;
    }
  }

  for (const auto& d : ast.domains) {
    int importer = resolve(d.importer, d.pos);
    int exporter = resolve(d.exporter, d.pos);
    if (importer < 0 || exporter < 0) continue;
    doc.mcs.contexts[static_cast<std::size_t>(importer)].importDomains[exporter] =
        d.constants;
  }

  if (result.diagnostics.empty()) {
    ValidationReport rep = validate_mcs(doc.mcs, doc.ics);
    for (const auto& v : rep.violations) diag({0, 0}, v.code + ": " + v.message);
  }
  if (result.diagnostics.empty()) result.document = std::move(doc);
  return result;
}

// ---------------------------------------------------------------------------
// Canonical serialization

namespace detail {

inline bool plain_constant(const std::string& s) {
  if (s.empty()) return false;
  if (std::isdigit(static_cast<unsigned char>(s[0]))) {
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  }
  if (!std::islower(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline std::string dsl_term(const Term& t) {
  if (t.isVariable()) return t.name;
  return plain_constant(t.name) ? t.name : '"' + t.name + '"';
}

inline std::string dsl_atom(const Atom& a) {
  std::string s = a.predicate;
  if (!a.args.empty()) {
    s += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) s += ',';
      s += dsl_term(a.args[i]);
    }
    s += ')';
  }
  return s;
}

inline std::string dsl_literal(const Document& doc, const ContextLiteral& lit) {
  std::string s;
  if (lit.negated) s += "not ";
  s += doc.mcs.contexts[static_cast<std::size_t>(lit.context)].name + " : ";
  if (lit.belief.kind == BeliefKind::Ordinary) return s + "*";
  if (lit.belief.kind == BeliefKind::Negative) s += "-";
  return s + dsl_atom(lit.belief.atom);
}

inline std::string dsl_body(const Document& doc, const std::vector<ContextLiteral>& body) {
  std::string s;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) s += ", ";
    s += dsl_literal(doc, body[i]);
  }
  return s;
}

}  // namespace detail

/// Deterministic canonical text for a document; `parse(serialize(d))` is
/// semantics-preserving.
inline std::string serialize(const Document& doc) {
  std::ostringstream os;
  for (int i = 0; i < doc.mcs.size(); ++i) {
    const Context& ctx = doc.mcs.contexts[static_cast<std::size_t>(i)];
    os << "context " << ctx.name << " kind " << (ctx.logic ? ctx.logic->kind() : "db")
       << " {\n";
    for (const auto& e : ctx.kb) {
      if (e.ordinary) os << "  *.\n";
      else os << "  " << detail::dsl_atom(e.atom) << ".\n";
    }
    if (auto* dl = dynamic_cast<const DatalogLogic*>(ctx.logic.get())) {
      for (const auto& r : dl->rules()) {
        os << "  " << detail::dsl_atom(r.head) << " :- ";
        for (std::size_t k = 0; k < r.body.size(); ++k) {
          if (k) os << ", ";
          os << detail::dsl_atom(r.body[k]);
        }
        os << ".\n";
      }
    }
    if (auto* cl = dynamic_cast<const ClosureLogic*>(ctx.logic.get())) {
      for (const auto& ax : cl->axioms()) {
        os << "  ";
        for (std::size_t k = 0; k < ax.body.size(); ++k) {
          if (k) os << ", ";
          os << detail::dsl_atom(ax.body[k]);
        }
        os << " => " << (ax.negativeHead ? "-" : "") << detail::dsl_atom(ax.head) << ".\n";
      }
    }
    os << "}\n";
    if (ctx.managed()) {
      os << "manage " << ctx.name << " {\n  ops ";
      bool first = true;
      for (const auto& op : ctx.ops) {
        if (!first) os << ", ";
        os << op;
        first = false;
      }
      os << ";\n";
      auto it = doc.keyedPredicates.find(i);
      if (it != doc.keyedPredicates.end() && !it->second.empty()) {
        os << "  keys ";
        first = true;
        for (const auto& p : it->second) {
          if (!first) os << ", ";
          os << p;
          first = false;
        }
        os << ";\n";
      }
      os << "}\n";
    }
    for (const auto& [j, dom] : ctx.importDomains) {
      os << "domain " << ctx.name << " : "
         << doc.mcs.contexts[static_cast<std::size_t>(j)].name << " { ";
      bool first = true;
      for (const auto& c : dom) {
        if (!first) os << ", ";
        os << (detail::plain_constant(c) ? c : '"' + c + '"');
        first = false;
      }
      os << " }\n";
    }
  }
  int ruleNum = 0;
  for (const auto& ctx : doc.mcs.contexts)
    for (const auto& r : ctx.rules) {
      os << "bridge " << (r.name.empty() ? "r" + std::to_string(++ruleNum) : r.name)
         << " : ";
      if (!r.head.op.empty()) os << r.head.op << "@";
      os << doc.mcs.contexts[static_cast<std::size_t>(r.head.context)].name << " : ";
      if (r.head.element.ordinary) os << "*";
      else os << detail::dsl_atom(r.head.element.atom);
      os << " :- " << detail::dsl_body(doc, r.body) << ".\n";
    }
  for (const auto& ic : doc.ics) {
    os << "ic :- ";
    std::string body = detail::dsl_body(doc, ic.positive);
    std::string negs = detail::dsl_body(doc, ic.negative);
    if (!negs.empty()) body += body.empty() ? negs : ", " + negs;
    for (const auto& b : ic.builtins) {
      std::string piece = detail::dsl_term(b.lhs) + (b.equal ? " = " : " != ") +
                          detail::dsl_term(b.rhs);
      body += body.empty() ? piece : ", " + piece;
    }
    os << body << ".\n";
  }
  return os.str();
}

/// Wrap a bare system (no DSL provenance) for serialization / reporting.
inline Document document_of(MultiContextSystem m, std::vector<IntegrityConstraint> ics = {}) {
  Document doc;
  doc.mcs = std::move(m);
  doc.ics = std::move(ics);
  for (int i = 0; i < doc.mcs.size(); ++i)
    doc.contextIndex[doc.mcs.contexts[static_cast<std::size_t>(i)].name] = i;
  return doc;
}

}  // namespace mcs
