#pragma once

// Line-oriented problem specs for the command-line tool. One directive per
// line, '#' starts a comment, an inline matrix block consumes the following
// `rows` lines. Functions and operators are stored unresolved and built once
// the task fixes their dimension.

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "monoprox/composition.hpp"
#include "monoprox/config.hpp"
#include "monoprox/convex.hpp"
#include "monoprox/errors.hpp"
#include "monoprox/linalg.hpp"
#include "monoprox/matrix_io.hpp"
#include "monoprox/operators.hpp"

namespace monoprox {

/// Malformed or inconsistent spec. Line and column are 1-based; column 0 means
/// the whole line.
class SpecError : public Error {
 public:
  SpecError(const std::string& what, int line, int column)
      : Error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what
                       : what),
        message_(what),
        line_(line),
        column_(column) {}
  /// 0 when the error concerns the file as a whole.
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// The diagnostic without the position prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

struct SpecToken {
  std::string text;
  int column = 0;
};

struct SpecLine {
  int line = 0;
  std::vector<SpecToken> tokens;

  const SpecToken& at(std::size_t i) const { return tokens.at(i); }
  std::size_t size() const { return tokens.size(); }
};

enum class ResolventKind { composed, parallel, metric, parallel_sum };

struct ProblemSpec {
  std::optional<SpecLine> task;
  std::map<std::string, Matrix> matrices;
  std::map<std::string, Vector> vectors;
  std::map<std::string, SpecLine> functions;
  std::map<std::string, SpecLine> operators;
  std::optional<SpecLine> metric;
  std::optional<SpecLine> prox;       // prox <f> <L>
  std::optional<SpecLine> resolvent;  // resolvent <kind> <a> <b>
  std::optional<SpecLine> admm;       // admm <f> <g> <L>
  std::optional<SpecLine> point;
  std::optional<SpecLine> route;
  ToleranceConfig tolerances;
  std::filesystem::path base_dir;
};

namespace detail {

inline std::vector<SpecToken> tokenize(const std::string& raw) {
  const std::string line = raw.substr(0, raw.find('#'));
  std::vector<SpecToken> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

inline std::optional<double> to_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

inline double number(const SpecLine& l, std::size_t i) {
  const auto v = to_number(l.at(i).text);
  if (!v) throw SpecError("expected a number, got '" + l.at(i).text + "'", l.line, l.at(i).column);
  return *v;
}

inline long integer(const SpecLine& l, std::size_t i) {
  const double v = number(l, i);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw SpecError("expected an integer, got '" + l.at(i).text + "'", l.line, l.at(i).column);
  return static_cast<long>(v);
}

inline void arity(const SpecLine& l, std::size_t lo, std::size_t hi, const std::string& usage) {
  if (l.size() < lo || l.size() > hi) {
    const int col = l.size() > hi ? l.at(hi).column : 0;
    throw SpecError("expected '" + usage + "'", l.line, col);
  }
}

inline bool valid_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

inline std::string declare(const SpecLine& l, std::size_t i, bool taken) {
  const std::string& name = l.at(i).text;
  if (!valid_name(name)) throw SpecError("invalid name '" + name + "'", l.line, l.at(i).column);
  if (taken) throw SpecError("'" + name + "' is already defined", l.line, l.at(i).column);
  return name;
}

inline void set_once(std::optional<SpecLine>& slot, const SpecLine& l) {
  if (slot) throw SpecError("'" + l.at(0).text + "' given twice (first on line " +
                                std::to_string(slot->line) + ")",
                            l.line, l.at(0).column);
  slot = l;
}

inline void apply_tolerance(ToleranceConfig& t, const SpecLine& l) {
  arity(l, 3, 3, "tol <key> <value>");
  const std::string& key = l.at(1).text;
  const double v = number(l, 2);
  if (!(v > 0.0)) throw SpecError("tolerance must be positive", l.line, l.at(2).column);
  if (key == "fix") t.tol_fix = v;
  else if (key == "admm") t.tol_admm = v;
  else if (key == "symmetry") t.symmetry = v;
  else if (key == "eigen-floor") t.eigen_floor = v;
  else if (key == "rank") t.rank_relative = v;
  else if (key == "monotone") t.monotone_floor = v;
  else if (key == "divergence") t.divergence_norm = v;
  else throw SpecError("unknown tolerance '" + key + "'", l.line, l.at(1).column);
}

inline void apply_max_iter(ToleranceConfig& t, const SpecLine& l) {
  arity(l, 3, 3, "max-iter <key> <n>");
  const std::string& key = l.at(1).text;
  const long n = integer(l, 2);
  if (n <= 0) throw SpecError("iteration budget must be positive", l.line, l.at(2).column);
  if (key == "inner") t.max_iter = static_cast<int>(n);
  else if (key == "admm") t.admm_max_iter = static_cast<int>(n);
  else if (key == "power") t.power_max_iter = static_cast<int>(n);
  else throw SpecError("unknown iteration budget '" + key + "'", l.line, l.at(1).column);
}

}  // namespace detail

inline ProblemSpec parse_spec(std::istream& in, const std::filesystem::path& base_dir = {}) {
  ProblemSpec spec;
  spec.base_dir = base_dir;
  std::string raw;
  int line_no = 0;
  auto taken = [&](const std::string& n) {
    return spec.matrices.count(n) || spec.vectors.count(n) || spec.functions.count(n) ||
           spec.operators.count(n);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    SpecLine l{line_no, detail::tokenize(raw)};
    if (l.tokens.empty()) continue;
    const std::string& head = l.at(0).text;
    if (head == "task") {
      detail::arity(l, 2, 2, "task <prox-eval|resolvent-eval|solve>");
      const std::string& t = l.at(1).text;
      if (t != "prox-eval" && t != "resolvent-eval" && t != "solve")
        throw SpecError("unknown task '" + t + "'", l.line, l.at(1).column);
      detail::set_once(spec.task, l);
    } else if (head == "matrix") {
      detail::arity(l, 3, 4, "matrix <name> <rows> <cols> | identity <n> | file <path>");
      const std::string name = detail::declare(l, 1, taken(l.at(1).text));
      if (l.at(2).text == "identity") {
        detail::arity(l, 4, 4, "matrix <name> identity <n>");
        const long n = detail::integer(l, 3);
        if (n <= 0) throw SpecError("dimension must be positive", l.line, l.at(3).column);
        spec.matrices[name] = Matrix::Identity(n, n);
      } else if (l.at(2).text == "file") {
        detail::arity(l, 4, 4, "matrix <name> file <path>");
        std::filesystem::path p = l.at(3).text;
        if (p.is_relative()) p = base_dir / p;
        std::ifstream f(p);
        if (!f) throw SpecError("cannot open '" + p.string() + "'", l.line, l.at(3).column);
        try {
          spec.matrices[name] = read_matrix(f);
        } catch (const FormatError& e) {
          throw SpecError(p.string() + ": " + e.what(), l.line, l.at(3).column);
        }
      } else {
        detail::arity(l, 4, 4, "matrix <name> <rows> <cols>");
        const long rows = detail::integer(l, 2), cols = detail::integer(l, 3);
        if (rows <= 0) throw SpecError("row count must be positive", l.line, l.at(2).column);
        if (cols <= 0) throw SpecError("column count must be positive", l.line, l.at(3).column);
        Matrix m(rows, cols);
        for (long r = 0; r < rows; ++r) {
          SpecLine row;
          do {
            if (!std::getline(in, raw))
              throw SpecError("matrix '" + name + "' ends after " + std::to_string(r) + " of " +
                                  std::to_string(rows) + " rows",
                              line_no, 0);
            row = SpecLine{++line_no, detail::tokenize(raw)};
          } while (row.tokens.empty());
          if (row.size() != static_cast<std::size_t>(cols))
            throw SpecError("expected " + std::to_string(cols) + " entries, got " +
                                std::to_string(row.size()),
                            row.line, row.size() > static_cast<std::size_t>(cols)
                                          ? row.at(static_cast<std::size_t>(cols)).column
                                          : 0);
          for (long c = 0; c < cols; ++c) m(r, c) = detail::number(row, static_cast<std::size_t>(c));
        }
        spec.matrices[name] = m;
      }
    } else if (head == "vector") {
      if (l.size() < 3) detail::arity(l, 3, 3, "vector <name> <entries...>");
      const std::string name = detail::declare(l, 1, taken(l.at(1).text));
      Vector v(static_cast<Index>(l.size() - 2));
      for (std::size_t i = 2; i < l.size(); ++i) v(static_cast<Index>(i - 2)) = detail::number(l, i);
      spec.vectors[name] = v;
    } else if (head == "function") {
      if (l.size() < 3) detail::arity(l, 3, 3, "function <name> <kind> <args...>");
      spec.functions[detail::declare(l, 1, taken(l.at(1).text))] = l;
    } else if (head == "operator") {
      if (l.size() < 3) detail::arity(l, 3, 3, "operator <name> <kind> <args...>");
      spec.operators[detail::declare(l, 1, taken(l.at(1).text))] = l;
    } else if (head == "metric") {
      if (l.size() < 2) detail::arity(l, 2, 2, "metric identity | diag <v> | dense <M> | scaled <rho>");
      detail::set_once(spec.metric, l);
    } else if (head == "prox") {
      detail::arity(l, 3, 3, "prox <function> <map>");
      detail::set_once(spec.prox, l);
    } else if (head == "resolvent") {
      detail::arity(l, 3, 4, "resolvent <composed|parallel|metric|parallel-sum> <args>");
      detail::set_once(spec.resolvent, l);
    } else if (head == "admm") {
      detail::arity(l, 4, 4, "admm <f> <g> <map>");
      detail::set_once(spec.admm, l);
    } else if (head == "point") {
      if (l.size() < 2) detail::arity(l, 2, 2, "point <vector> | point <entries...>");
      detail::set_once(spec.point, l);
    } else if (head == "route") {
      detail::arity(l, 2, 2, "route <general|closed_range|full_range|auto>");
      detail::set_once(spec.route, l);
    } else if (head == "tol") {
      detail::apply_tolerance(spec.tolerances, l);
    } else if (head == "max-iter") {
      detail::apply_max_iter(spec.tolerances, l);
    } else {
      throw SpecError("unknown directive '" + head + "'", l.line, l.at(0).column);
    }
  }
  return spec;
}

inline ProblemSpec parse_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file '" + path.string() + "'", 0, 0);
  return parse_spec(in, path.parent_path());
}

// ------------------------------------------------------------- resolution

/// Builds the objects a spec refers to. Library validation failures (shape,
/// symmetry, definiteness, monotonicity) are reported at the offending line.
class SpecResolver {
 public:
  explicit SpecResolver(const ProblemSpec& spec) : spec_(spec) {}

  const Matrix& matrix(const SpecLine& l, std::size_t i) const {
    const auto it = spec_.matrices.find(l.at(i).text);
    if (it == spec_.matrices.end())
      throw SpecError("unknown matrix '" + l.at(i).text + "'", l.line, l.at(i).column);
    return it->second;
  }

  /// A named vector of length n, or a scalar literal broadcast to length n.
  Vector vector_or_scalar(const SpecLine& l, std::size_t i, Index n) const {
    if (const auto v = detail::to_number(l.at(i).text)) return Vector::Constant(n, *v);
    const Vector& v = vector(l, i);
    expect_size(v.size(), n, l, i);
    return v;
  }

  const Vector& vector(const SpecLine& l, std::size_t i) const {
    const auto it = spec_.vectors.find(l.at(i).text);
    if (it == spec_.vectors.end())
      throw SpecError("unknown vector '" + l.at(i).text + "'", l.line, l.at(i).column);
    return it->second;
  }

  LinearMap map(const SpecLine& l, std::size_t i) const { return LinearMap(matrix(l, i)); }

  ConvexFunction function(const SpecLine& use, std::size_t i, Index n) const {
    const auto it = spec_.functions.find(use.at(i).text);
    if (it == spec_.functions.end())
      throw SpecError("unknown function '" + use.at(i).text + "'", use.line, use.at(i).column);
    const SpecLine& d = it->second;
    const std::string& kind = d.at(2).text;
    return guarded(d, [&] {
      if (kind == "l1") {
        detail::arity(d, 4, 4, "function <name> l1 <lambda>");
        return l1(n, detail::number(d, 3));
      }
      if (kind == "quadratic") {
        detail::arity(d, 5, 6, "function <name> quadratic <M> <v> [c]");
        const Matrix& a = matrix(d, 3);
        expect_square(a, n, d, 3);
        const double c = d.size() == 6 ? detail::number(d, 5) : 0.0;
        return quadratic(a, vector_or_scalar(d, 4, n), c, spec_.tolerances);
      }
      if (kind == "sqdist") {
        detail::arity(d, 4, 4, "function <name> sqdist <v>");
        return squared_distance(vector_or_scalar(d, 3, n));
      }
      if (kind == "box") {
        detail::arity(d, 5, 5, "function <name> box <lo> <hi>");
        return indicator_box(vector_or_scalar(d, 3, n), vector_or_scalar(d, 4, n));
      }
      if (kind == "ball") {
        detail::arity(d, 5, 5, "function <name> ball <center> <radius>");
        return indicator_ball(vector_or_scalar(d, 3, n), detail::number(d, 4));
      }
      if (kind == "exp") {
        detail::arity(d, 4, 4, "function <name> exp <index>");
        const long k = detail::integer(d, 3);
        if (k < 0 || k >= n)
          throw SpecError("index " + std::to_string(k) + " outside 0.." + std::to_string(n - 1), d.line,
                          d.at(3).column);
        return separable_exp(n, k);
      }
      if (kind == "zero") {
        detail::arity(d, 3, 3, "function <name> zero");
        return zero(n);
      }
      if (kind == "linear") {
        detail::arity(d, 4, 4, "function <name> linear <v>");
        return linear(vector_or_scalar(d, 3, n));
      }
      if (kind == "affine") {
        detail::arity(d, 5, 5, "function <name> affine <M> <v>");
        const Matrix& c = matrix(d, 3);
        if (c.cols() != n)
          throw SpecError("matrix '" + d.at(3).text + "' has " + std::to_string(c.cols()) +
                              " columns, expected " + std::to_string(n),
                          d.line, d.at(3).column);
        return indicator_affine(c, vector_or_scalar(d, 4, c.rows()), spec_.tolerances);
      }
      if (kind == "conjugate") {
        detail::arity(d, 4, 4, "function <name> conjugate <function>");
        if (d.at(3).text == d.at(1).text)
          throw SpecError("a function cannot be its own conjugate", d.line, d.at(3).column);
        return function(d, 3, n).conjugate();
      }
      throw SpecError("unknown function kind '" + kind + "'", d.line, d.at(2).column);
    });
  }

  MonotoneOperator op(const SpecLine& use, std::size_t i, Index n, int depth = 0) const {
    const auto it = spec_.operators.find(use.at(i).text);
    if (it == spec_.operators.end())
      throw SpecError("unknown operator '" + use.at(i).text + "'", use.line, use.at(i).column);
    const SpecLine& d = it->second;
    if (depth > 32) throw SpecError("operator definitions are cyclic", d.line, d.at(1).column);
    const std::string& kind = d.at(2).text;
    return guarded(d, [&] {
      if (kind == "affine") {
        detail::arity(d, 5, 5, "operator <name> affine <M> <v>");
        const Matrix& a = matrix(d, 3);
        expect_square(a, n, d, 3);
        return affine_operator(a, vector_or_scalar(d, 4, n), spec_.tolerances);
      }
      if (kind == "subdiff") {
        detail::arity(d, 4, 4, "operator <name> subdiff <function>");
        return subdifferential(function(d, 3, n));
      }
      if (kind == "inverse") {
        detail::arity(d, 4, 4, "operator <name> inverse <operator>");
        return inverse_operator(op(d, 3, n, depth + 1));
      }
      if (kind == "zero") {
        detail::arity(d, 3, 3, "operator <name> zero");
        return zero_operator(n);
      }
      if (kind == "identity") {
        detail::arity(d, 4, 4, "operator <name> identity <c>");
        const double c = detail::number(d, 3);
        if (c < 0.0) throw SpecError("identity scale must be nonnegative", d.line, d.at(3).column);
        return scaled_identity(n, c);
      }
      throw SpecError("unknown operator kind '" + kind + "'", d.line, d.at(2).column);
    });
  }

  /// The metric on a space of dimension n; identity when not given.
  Metric metric(Index n) const {
    if (!spec_.metric) return Metric::identity(n);
    const SpecLine& d = *spec_.metric;
    const std::string& kind = d.at(1).text;
    return guarded(d, [&] {
      if (kind == "identity") {
        detail::arity(d, 2, 2, "metric identity");
        return Metric::identity(n);
      }
      if (kind == "scaled") {
        detail::arity(d, 3, 3, "metric scaled <rho>");
        const double rho = detail::number(d, 2);
        if (!(rho > 0.0)) throw SpecError("rho must be positive", d.line, d.at(2).column);
        return Metric::scaled(n, rho);
      }
      if (kind == "diag") {
        detail::arity(d, 3, 3, "metric diag <v>");
        return Metric::diagonal(vector_or_scalar(d, 2, n));
      }
      if (kind == "dense") {
        detail::arity(d, 3, 3, "metric dense <M>");
        const Matrix& m = matrix(d, 2);
        expect_square(m, n, d, 2);
        return spd_sqrt(m, spec_.tolerances);
      }
      throw SpecError("unknown metric kind '" + kind + "'", d.line, d.at(1).column);
    });
  }

  /// The evaluation point, of dimension n.
  Vector point(Index n, const SpecLine& requester) const {
    if (!spec_.point) throw SpecError("missing 'point' directive", requester.line, 0);
    const SpecLine& d = *spec_.point;
    Vector v;
    if (d.size() == 2 && !detail::to_number(d.at(1).text)) {
      v = vector(d, 1);
    } else {
      v.resize(static_cast<Index>(d.size() - 1));
      for (std::size_t i = 1; i < d.size(); ++i) v(static_cast<Index>(i - 1)) = detail::number(d, i);
    }
    if (v.size() != n)
      throw SpecError("point has dimension " + std::to_string(v.size()) + ", expected " + std::to_string(n),
                      d.line, d.at(1).column);
    return v;
  }

  Route route() const {
    if (!spec_.route) return Route::automatic;
    const SpecLine& d = *spec_.route;
    const std::string& r = d.at(1).text;
    if (r == "general") return Route::general;
    if (r == "closed_range") return Route::closed_range;
    if (r == "full_range") return Route::full_range;
    if (r == "auto") return Route::automatic;
    throw SpecError("unknown route '" + r + "'", d.line, d.at(1).column);
  }

 private:
  static void expect_size(Index got, Index want, const SpecLine& l, std::size_t i) {
    if (got != want)
      throw SpecError("'" + l.at(i).text + "' has dimension " + std::to_string(got) + ", expected " +
                          std::to_string(want),
                      l.line, l.at(i).column);
  }

  static void expect_square(const Matrix& m, Index n, const SpecLine& l, std::size_t i) {
    if (m.rows() != n || m.cols() != n)
      throw SpecError("matrix '" + l.at(i).text + "' is " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected " + std::to_string(n) + "x" +
                          std::to_string(n),
                      l.line, l.at(i).column);
  }

  template <class Build>
  static auto guarded(const SpecLine& d, const Build& build) -> decltype(build()) {
    try {
      return build();
    } catch (const SpecError&) {
      throw;
    } catch (const Error& e) {
      throw SpecError(e.what(), d.line, d.size() > 2 ? d.at(2).column : d.at(0).column);
    }
  }

  const ProblemSpec& spec_;
};

// ------------------------------------------------------------------ tasks

struct ProxTask {
  ConvexFunction f;
  LinearMap l;
  Metric u;
  Vector point;
};

struct ResolventTask {
  ResolventKind kind = ResolventKind::composed;
  MonotoneOperator a;
  std::optional<MonotoneOperator> b;  ///< second operand of a parallel sum
  std::optional<LinearMap> map;
  Metric u;
  Vector point;
  Route route = Route::automatic;
};

struct SolveTask {
  ConvexFunction f;
  ConvexFunction g;
  LinearMap l;
  Metric u;
};

namespace detail {

inline void check_task(const ProblemSpec& spec, const std::string& want) {
  if (spec.task && spec.task->at(1).text != want)
    throw SpecError("spec declares task '" + spec.task->at(1).text + "' but '" + want + "' was requested",
                    spec.task->line, spec.task->at(1).column);
}

inline const SpecLine& need(const std::optional<SpecLine>& slot, const std::string& directive) {
  if (!slot) throw SpecError("missing '" + directive + "' directive", 0, 0);
  return *slot;
}

}  // namespace detail

/// prox <f> <L>: f on H = dom L, metric and point on G = codomain of L.
inline ProxTask prox_task(const ProblemSpec& spec) {
  detail::check_task(spec, "prox-eval");
  const SpecLine& d = detail::need(spec.prox, "prox");
  const SpecResolver r(spec);
  const LinearMap l = r.map(d, 2);
  return ProxTask{r.function(d, 1, l.cols()), l, r.metric(l.rows()), r.point(l.rows(), d)};
}

/// resolvent composed <B> <M>:  J_{U M* B M},  B on H, M : G -> H, point in G
/// resolvent parallel <A> <L>:  J_{U (L |> A)}, A on H, L : H -> G, point in G
/// resolvent metric <A>:        J_{U A}, point in the space of A
/// resolvent parallel-sum <B> <C>: J_{B [] C}, Euclidean
inline ResolventTask resolvent_task(const ProblemSpec& spec) {
  detail::check_task(spec, "resolvent-eval");
  const SpecLine& d = detail::need(spec.resolvent, "resolvent");
  const SpecResolver r(spec);
  const std::string& kind = d.at(1).text;
  ResolventTask t{ResolventKind::composed, zero_operator(1), std::nullopt, std::nullopt,
                  Metric::identity(1), Vector(), r.route()};
  if (kind == "composed" || kind == "parallel") {
    detail::arity(d, 4, 4, "resolvent " + kind + " <operator> <map>");
    const LinearMap m = r.map(d, 3);
    const bool composed = kind == "composed";
    t.kind = composed ? ResolventKind::composed : ResolventKind::parallel;
    t.a = r.op(d, 2, composed ? m.rows() : m.cols());
    t.map = m;
    const Index g = composed ? m.cols() : m.rows();
    t.u = r.metric(g);
    t.point = r.point(g, d);
  } else if (kind == "metric" || kind == "parallel-sum") {
    const bool sum = kind == "parallel-sum";
    detail::arity(d, sum ? 4 : 3, sum ? 4 : 3,
                  sum ? "resolvent parallel-sum <operator> <operator>" : "resolvent metric <operator>");
    if (!spec.point) throw SpecError("missing 'point' directive", d.line, 0);
    const SpecLine& p = *spec.point;
    const Index n = p.size() == 2 && !detail::to_number(p.at(1).text) ? r.vector(p, 1).size()
                                                                      : static_cast<Index>(p.size() - 1);
    t.kind = sum ? ResolventKind::parallel_sum : ResolventKind::metric;
    t.a = r.op(d, 2, n);
    if (sum) {
      t.b = r.op(d, 3, n);
      if (spec.metric)
        throw SpecError("parallel-sum resolvents are Euclidean; drop the 'metric' directive", spec.metric->line,
                        spec.metric->at(0).column);
    }
    t.u = r.metric(n);
    t.point = r.point(n, d);
  } else {
    throw SpecError("unknown resolvent kind '" + kind + "'", d.line, d.at(1).column);
  }
  return t;
}

/// admm <f> <g> <L>: min f(x) + g(L x), penalty metric U on the codomain of L.
inline SolveTask solve_task(const ProblemSpec& spec) {
  detail::check_task(spec, "solve");
  const SpecLine& d = detail::need(spec.admm, "admm");
  const SpecResolver r(spec);
  const LinearMap l = r.map(d, 3);
  return SolveTask{r.function(d, 1, l.cols()), r.function(d, 2, l.rows()), l, r.metric(l.rows())};
}

}  // namespace monoprox
