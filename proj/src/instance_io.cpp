#include "cadmm/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cadmm {

namespace {

using nlohmann::json;

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back({v[k].real(), v[k].imag()});
  return out;
}

json rvec_to_json(const RVec& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

json mat_to_json(const Mat& a) {
  json data = json::array();
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) data.push_back({a(r, c).real(), a(r, c).imag()});
  }
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"data", std::move(data)}};
}

Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidInputError("expected an [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec vec_from(const json& j) {
  if (!j.is_array()) throw InvalidInputError("expected a vector of [re, im] pairs");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Index>(k)] = complex_from(j[k]);
  return v;
}

RVec rvec_from(const json& j) {
  if (!j.is_array()) throw InvalidInputError("expected an array of numbers");
  RVec v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Index>(k)] = j[k].get<double>();
  return v;
}

Mat mat_from(const json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw InvalidInputError("matrix data length disagrees with rows x cols");
  }
  Mat a(rows, cols);
  std::size_t k = 0;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) a(r, c) = complex_from(data[k++]);
  }
  return a;
}

std::string sense_name(ConstraintSense s) {
  switch (s.kind()) {
    case ConstraintSense::Kind::LessEqual:
      return "le";
    case ConstraintSense::Kind::GreaterEqual:
      return "ge";
    case ConstraintSense::Kind::Equal:
      return "eq";
    case ConstraintSense::Kind::Bounded:
      return "bounded";
  }
  return "le";
}

ConstraintSense sense_from(const json& c) {
  const auto name = c.at("sense").get<std::string>();
  if (name == "le") return ConstraintSense::less_equal();
  if (name == "ge") return ConstraintSense::greater_equal();
  if (name == "eq") return ConstraintSense::equal();
  if (name == "bounded") return ConstraintSense::bounded(c.at("eps").get<double>());
  throw InvalidInputError("unknown constraint sense '" + name + "'");
}

std::string noise_name(NoiseModel m) {
  switch (m) {
    case NoiseModel::Noiseless:
      return "none";
    case NoiseModel::Bounded:
      return "bounded";
    case NoiseModel::Gaussian:
      return "gaussian";
  }
  return "none";
}

NoiseModel noise_from(const std::string& name) {
  if (name == "none") return NoiseModel::Noiseless;
  if (name == "bounded") return NoiseModel::Bounded;
  if (name == "gaussian") return NoiseModel::Gaussian;
  throw InvalidInputError("unknown noise model '" + name + "'");
}

json problem_to_json(const QcqpProblem& p) {
  json j;
  j["n"] = p.n();
  j["field"] = p.field() == Field::Real ? "real" : "complex";
  j["objective"] = {{"A", mat_to_json(p.objective().A0.matrix())},
                    {"b", vec_to_json(p.objective().b0)}};
  json cons = json::array();
  for (const auto& q : p.constraints()) {
    json c;
    if (q.rank1()) {
      c["a"] = vec_to_json(*q.rank1());
    } else {
      c["A"] = mat_to_json(q.A().matrix());
      c["b"] = vec_to_json(q.b());
    }
    c["c"] = q.c();
    c["sense"] = sense_name(q.sense());
    if (q.sense().kind() == ConstraintSense::Kind::Bounded) c["eps"] = q.sense().eps();
    cons.push_back(std::move(c));
  }
  j["constraints"] = std::move(cons);
  return j;
}

QcqpProblem problem_from(const json& j) {
  const auto n = j.at("n").get<Index>();
  const std::string field = j.value("field", "complex");
  if (field != "real" && field != "complex") throw InvalidInputError("unknown field '" + field + "'");
  const json& obj = j.at("objective");
  Objective objective{HermitianMatrix(mat_from(obj.at("A"))), vec_from(obj.at("b"))};
  std::vector<QuadraticConstraint> cons;
  for (const json& c : j.at("constraints")) {
    const ConstraintSense sense = sense_from(c);
    const double rhs = c.at("c").get<double>();
    if (c.contains("a")) {
      cons.push_back(QuadraticConstraint::rank_one(vec_from(c.at("a")), rhs, sense));
    } else {
      cons.emplace_back(HermitianMatrix(mat_from(c.at("A"))), vec_from(c.at("b")), rhs, sense);
    }
  }
  QcqpProblem p(std::move(objective), std::move(cons),
                field == "real" ? Field::Real : Field::Complex);
  if (p.n() != n) throw InvalidInputError("declared n disagrees with the data");
  return p;
}

struct ToJson {
  json operator()(const QcqpProblem& p) const {
    json j = problem_to_json(p);
    j["kind"] = "qcqp";
    return j;
  }
  json operator()(const FppInstance& f) const {
    json j = problem_to_json(f.problem);
    j["kind"] = "fpp";
    j["x_feas"] = vec_to_json(f.x_feas);
    return j;
  }
  json operator()(const BeamformingInstance& b) const {
    return {{"kind", "mb"},      {"n", b.H.rows()},   {"field", "complex"},
            {"H", mat_to_json(b.H)}, {"G", mat_to_json(b.G)}, {"tau", b.tau},
            {"eta", b.eta}};
  }
  json operator()(const PhaseRetrievalInstance& p) const {
    json j = {{"kind", "pr"},
              {"n", p.A_s.rows()},
              {"field", "complex"},
              {"A_s", mat_to_json(p.A_s)},
              {"y", rvec_to_json(p.y)},
              {"noise", noise_name(p.noise)},
              {"eps", p.eps},
              {"snr_db", p.snr_db}};
    if (p.s) j["s"] = vec_to_json(*p.s);
    return j;
  }
};

Instance instance_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "qcqp") return problem_from(j);
  if (kind == "fpp") {
    FppInstance f{problem_from(j), vec_from(j.at("x_feas"))};
    if (f.x_feas.size() != f.problem.n()) throw InvalidInputError("x_feas has the wrong length");
    return f;
  }
  if (kind == "mb") {
    BeamformingInstance b;
    b.H = mat_from(j.at("H"));
    b.G = j.contains("G") ? mat_from(j.at("G")) : Mat(b.H.rows(), 0);
    b.tau = j.at("tau").get<double>();
    b.eta = j.value("eta", 1.0);
    if (b.G.rows() != b.H.rows()) throw InvalidInputError("H and G row counts differ");
    return b;
  }
  if (kind == "pr") {
    PhaseRetrievalInstance p;
    p.A_s = mat_from(j.at("A_s"));
    p.y = rvec_from(j.at("y"));
    p.noise = noise_from(j.value("noise", "none"));
    p.eps = j.value("eps", 0.5);
    p.snr_db = j.value("snr_db", 20.0);
    if (j.contains("s")) p.s = vec_from(j.at("s"));
    if (p.y.size() != p.A_s.cols()) throw InvalidInputError("y length disagrees with A_s");
    if (p.s && p.s->size() != p.A_s.rows()) throw InvalidInputError("s has the wrong length");
    return p;
  }
  throw InvalidInputError("unknown instance kind '" + kind + "'");
}

}  // namespace

std::string instance_kind(const Instance& inst) {
  static const char* names[] = {"qcqp", "fpp", "mb", "pr"};
  return names[inst.index()];
}

std::string to_json_string(const Instance& inst) { return std::visit(ToJson{}, inst).dump(); }

Instance from_json_string(const std::string& text) {
  try {
    return instance_from(json::parse(text));
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("malformed instance: ") + e.what());
  }
}

void write_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << to_json_string(inst) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return from_json_string(text.str());
}

}  // namespace cadmm
