#include "skinlock/io.hpp"

#include "skinlock/errors.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace skinlock {

json matrix_to_json(const CMatrix& m, const std::vector<std::string>& labels) {
  require(labels.empty() || static_cast<Index>(labels.size()) == m.rows(), ErrorKind::parameter,
          "label count does not match matrix dimension");
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (Index k = 0; k < m.cols(); ++k) {
      re_row.push_back(m(i, k).real());
      im_row.push_back(m(i, k).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  json out;
  out["dim"] = m.rows();
  out["labels"] = labels.empty() ? numeric_labels(static_cast<int>(m.rows())) : labels;
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out;
}

CMatrix matrix_from_json(const json& j, std::vector<std::string>* labels) {
  try {
    const Index dim = j.at("dim").get<Index>();
    require(dim >= 1, ErrorKind::io, "matrix dim must be >= 1");
    const auto& re = j.at("re");
    const auto& im = j.contains("im") ? j.at("im") : json();
    require(re.is_array() && static_cast<Index>(re.size()) == dim, ErrorKind::io,
            "matrix 're' must have dim rows");
    CMatrix m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
      const auto& row = re.at(static_cast<std::size_t>(r));
      require(static_cast<Index>(row.size()) == dim, ErrorKind::io, "matrix rows must have dim entries");
      for (Index c = 0; c < dim; ++c) {
        const double imag = im.is_null() ? 0.0 : im.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
        m(r, c) = cdouble(row.at(static_cast<std::size_t>(c)).get<double>(), imag);
      }
    }
    if (labels) {
      *labels = j.contains("labels") ? j.at("labels").get<std::vector<std::string>>()
                                     : numeric_labels(static_cast<int>(dim));
      require(static_cast<Index>(labels->size()) == dim, ErrorKind::io, "label count does not match dim");
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("malformed matrix JSON: ") + e.what());
  }
}

std::string to_string(SpectrumSource source) {
  switch (source) {
    case SpectrumSource::numeric: return "numeric";
    case SpectrumSource::hn_closed_form: return "hn_closed_form";
    case SpectrumSource::diagonal_similarity: return "diagonal_similarity";
  }
  return "unknown";
}

json spectrum_to_json(const BiorthogonalSpectrum& spectrum) {
  json re = json::array();
  json im = json::array();
  for (Index n = 0; n < spectrum.dim(); ++n) {
    re.push_back(spectrum.betas(n).real());
    im.push_back(spectrum.betas(n).imag());
  }
  json out;
  out["betas"] = {{"re", std::move(re)}, {"im", std::move(im)}};
  out["right"] = matrix_to_json(spectrum.right);
  out["left"] = matrix_to_json(spectrum.left);
  out["condition_estimate"] = spectrum.condition_estimate;
  out["source"] = to_string(spectrum.source);
  return out;
}

json correlator_to_json(const SteadyCorrelator& c, const json& parameters) {
  json out = matrix_to_json(c.entries);
  const auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  out["metadata"] = {{"method", std::string(to_string(c.method))},
                     {"residual", finite_or_null(c.residual)},
                     {"residual_tolerance", finite_or_null(c.residual_tolerance)},
                     {"asymmetry", c.asymmetry},
                     {"time", c.time},
                     {"parameters", parameters}};
  return out;
}

namespace {

json jump_list(const std::vector<Jump>& jumps) {
  json list = json::array();
  for (const auto& jump : jumps) {
    json re = json::array();
    json im = json::array();
    for (Index k = 0; k < jump.coefficients.size(); ++k) {
      re.push_back(jump.coefficients(k).real());
      im.push_back(jump.coefficients(k).imag());
    }
    list.push_back({{"label", jump.label},
                    {"kind", std::string(to_string(jump.kind))},
                    {"re", std::move(re)},
                    {"im", std::move(im)}});
  }
  return list;
}

std::vector<Jump> parse_jump_list(const json& list, Index dim) {
  std::vector<Jump> out;
  for (const auto& item : list) {
    Jump jump;
    jump.label = item.at("label").get<std::string>();
    const std::string kind = item.value("kind", "onsite");
    if (kind == "bond") jump.kind = JumpKind::bond;
    else if (kind == "pump") jump.kind = JumpKind::pump;
    else if (kind == "onsite") jump.kind = JumpKind::onsite;
    else fail(ErrorKind::io, "unknown jump kind '" + kind + "'");
    const auto& re = item.at("re");
    require(static_cast<Index>(re.size()) == dim, ErrorKind::io,
            "jump '" + jump.label + "' has the wrong length");
    jump.coefficients = CVector::Zero(dim);
    for (Index k = 0; k < dim; ++k) {
      const double imag = item.contains("im") ? item.at("im").at(static_cast<std::size_t>(k)).get<double>() : 0.0;
      jump.coefficients(k) = cdouble(re.at(static_cast<std::size_t>(k)).get<double>(), imag);
    }
    out.push_back(std::move(jump));
  }
  return out;
}

}  // namespace

json jumps_to_json(const JumpSet& jumps) {
  json out;
  out["dim"] = jumps.dim;
  out["losses"] = jump_list(jumps.losses);
  out["gains"] = jump_list(jumps.gains);
  return out;
}

JumpSet jumps_from_json(const json& j) {
  try {
    JumpSet set;
    set.dim = j.at("dim").get<Index>();
    require(set.dim >= 1, ErrorKind::io, "jump set dim must be >= 1");
    set.losses = parse_jump_list(j.value("losses", json::array()), set.dim);
    set.gains = parse_jump_list(j.value("gains", json::array()), set.dim);
    return set;
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("malformed jump JSON: ") + e.what());
  }
}

json realization_to_json(const MicroscopicRealization& r) {
  json out;
  out["hamiltonian"] = matrix_to_json(r.hamiltonian);
  out["gain_gram"] = matrix_to_json(r.gain_gram);
  out["loss_gram"] = matrix_to_json(r.loss_gram);
  out["loss_min_eigenvalue"] = r.loss_min_eigenvalue;
  out["physical"] = r.physical;
  if (r.jumps) out["jumps"] = jumps_to_json(*r.jumps);
  return out;
}

json trajectory_to_json(const MasterTrajectory& trajectory) {
  json snaps = json::array();
  for (const auto& s : trajectory.snapshots) {
    snaps.push_back({{"t", s.time}, {"rho", matrix_to_json(s.rho)}});
  }
  return {{"max_trace_drift", trajectory.max_trace_drift}, {"snapshots", std::move(snaps)}};
}

std::string format_csv(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

namespace {

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& line : comments) out << "# " << line << '\n';
}

}  // namespace

void write_source_scan_csv(std::ostream& out, const std::vector<SourceScanRow>& rows,
                           const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "s,nu_max,A1,nu_max_norm,A1_norm\n";
  for (const auto& r : rows) {
    out << r.site << ',' << format_csv(r.nu_max) << ',' << format_csv(r.loading) << ','
        << format_csv(r.nu_max_norm) << ',' << format_csv(r.loading_norm) << '\n';
  }
}

void write_crossover_csv(std::ostream& out, const std::vector<CrossoverRow>& rows,
                         const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "g,O_edge,O_slow,edge_mode_index,slow_mode_index\n";
  for (const auto& r : rows) {
    if (r.error) {
      out << format_csv(r.g) << ",nan,nan,0,0\n";
      continue;
    }
    out << format_csv(r.g) << ',' << format_csv(r.overlap_edge) << ',' << format_csv(r.overlap_slow)
        << ',' << r.edge_mode << ',' << r.slow_mode << '\n';
  }
}

void write_profiles_csv(std::ostream& out, const std::vector<ProfileRow>& rows,
                        const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "j,label,R_slow_sq,phi_max_sq,density_norm\n";
  for (const auto& r : rows) {
    out << r.j << ',' << r.label << ',' << format_csv(r.r_slow_sq) << ',' << format_csv(r.phi_max_sq)
        << ',' << format_csv(r.density_norm) << '\n';
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::io, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write '" + path + "'");
  out << text;
  require(static_cast<bool>(out), ErrorKind::io, "write to '" + path + "' failed");
}

}  // namespace skinlock
