#pragma once

#include "qcg/channels.hpp"
#include "qcg/sdp/problem.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace qcg::io {

using nlohmann::json;

inline std::pair<json, json> matrix_parts(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ri = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {std::move(re), std::move(im)};
}

inline ComplexMatrix matrix_from_parts(const json& re, const json& im) {
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(re.at(0).size()) : 0;
  if (im.size() != re.size()) throw Error(ErrorKind::kDimensionMismatch, "real_part and imag_part differ in shape");
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& rr = re.at(static_cast<std::size_t>(i));
    const auto& ri = im.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(rr.size()) != cols || static_cast<Eigen::Index>(ri.size()) != cols) {
      throw Error(ErrorKind::kDimensionMismatch, "ragged matrix rows");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = Complex(rr.at(static_cast<std::size_t>(j)).get<double>(), ri.at(static_cast<std::size_t>(j)).get<double>());
    }
  }
  return m;
}

inline json to_json(const ComplexMatrix& m) {
  auto [re, im] = matrix_parts(m);
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"real_part", std::move(re)}, {"imag_part", std::move(im)}};
}

inline json to_json(const ConditionalState& cs) {
  auto [re, im] = matrix_parts(cs.matrix);
  return {{"dims", {cs.dims.dim_a, cs.dims.dim_b}},
          {"form", to_string(cs.form)},
          {"real_part", std::move(re)},
          {"imag_part", std::move(im)}};
}

inline json to_json(const KrausChannel& ch) {
  json re = json::array();
  json im = json::array();
  for (const auto& k : ch.operators()) {
    auto [r, i] = matrix_parts(k);
    re.push_back(std::move(r));
    im.push_back(std::move(i));
  }
  return {{"dims", {ch.dim_in(), ch.dim_out()}},
          {"form", "kraus"},
          {"real_part", std::move(re)},
          {"imag_part", std::move(im)}};
}

inline ConditionalState conditional_state_from_json(const json& j) {
  const std::string form = j.at("form").get<std::string>();
  if (form != "choi" && form != "jamiolkowski") {
    throw Error(ErrorKind::kInvalidArgument, "expected a conditional state, found form '" + form + "'");
  }
  const BipartiteDims dims{j.at("dims").at(0).get<std::size_t>(), j.at("dims").at(1).get<std::size_t>()};
  return {dims, form == "choi" ? Form::kChoi : Form::kJamiolkowski,
          matrix_from_parts(j.at("real_part"), j.at("imag_part"))};
}

inline KrausChannel kraus_channel_from_json(const json& j, double tol = kCptpTolerance) {
  if (j.at("form").get<std::string>() != "kraus") {
    throw Error(ErrorKind::kInvalidArgument, "expected form 'kraus'");
  }
  const auto& re = j.at("real_part");
  const auto& im = j.at("imag_part");
  if (re.size() != im.size()) throw Error(ErrorKind::kDimensionMismatch, "Kraus real/imag counts differ");
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < re.size(); ++k) ops.push_back(matrix_from_parts(re.at(k), im.at(k)));
  KrausChannel ch = KrausChannel::trace_nonincreasing(std::move(ops), tol);
  const std::size_t din = j.at("dims").at(0).get<std::size_t>();
  const std::size_t dout = j.at("dims").at(1).get<std::size_t>();
  if (ch.dim_in() != din || ch.dim_out() != dout) {
    throw Error(ErrorKind::kDimensionMismatch, "Kraus operator shapes disagree with dims");
  }
  return ch;
}

// Reads either document kind and returns the channel's Choi state.
inline ConditionalState choi_from_json(const json& j) {
  if (j.at("form").get<std::string>() == "kraus") return kraus_to_choi(kraus_channel_from_json(j));
  return conditional_state_from_json(j).as(Form::kChoi);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidArgument, "cannot open '" + path + "'");
  return json::parse(in);
}

inline json to_json(const sdp::SdpProblem& p) {
  json blocks = json::array();
  for (const auto& b : p.blocks()) blocks.push_back({{"name", b.name}, {"dim", b.dim}});
  json scalars = json::array();
  for (const auto& s : p.scalars()) {
    scalars.push_back({{"name", s.name}, {"domain", s.domain == sdp::ScalarDomain::kFree ? "free" : "nonnegative"}});
  }
  json constraints = json::array();
  for (const auto& c : p.constraints()) {
    constraints.push_back({{"name", c.name}, {"dim", c.dim}, {"terms", c.terms.size()}});
  }
  return {{"blocks", blocks}, {"scalars", scalars}, {"constraints", constraints}};
}

inline json to_json(const sdp::SdpSolution& s) {
  json out = {{"status", sdp::to_string(s.status)},
              {"message", s.message},
              {"objective_value", s.objective_value},
              {"dual_objective", s.dual_objective},
              {"iterations", s.iterations},
              {"residuals", {{"primal", s.primal_residual}, {"dual", s.dual_residual}, {"gap", s.gap}}},
              {"presolve",
               {{"rows", s.presolve.rows},
                {"independent_rows", s.presolve.independent_rows},
                {"coordinates", s.presolve.coordinates},
                {"fixed_variables", s.presolve.fixed_variables}}}};
  json blocks = json::object();
  for (const auto& [name, m] : s.blocks) blocks[name] = to_json(m);
  out["blocks"] = blocks;
  out["scalars"] = s.scalars;
  json history = json::array();
  for (const auto& h : s.history) {
    history.push_back({{"iteration", h.iteration},
                       {"primal", h.primal_residual},
                       {"dual", h.dual_residual},
                       {"gap", h.gap},
                       {"mu", h.mu},
                       {"step", h.step}});
  }
  out["history"] = history;
  if (s.certificate) {
    out["certificate"] = {{"kind", s.certificate->kind},
                          {"b_dot_y", s.certificate->b_dot_y},
                          {"violation", s.certificate->violation},
                          {"detail", s.certificate->detail},
                          {"y", std::vector<double>(s.certificate->y.data(), s.certificate->y.data() + s.certificate->y.size())}};
  }
  return out;
}

}  // namespace qcg::io
