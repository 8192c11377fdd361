#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "rmtlab/errors.hpp"
#include "rmtlab/harness.hpp"

namespace rmtlab {

namespace {
std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

std::string describe_potential(const Potential& p) {
  std::string out;
  for (double c : p.coefficients()) out += (out.empty() ? "" : " ") + num(c);
  return out;
}

void emit_report(const ConvergenceReport& rep, std::ostream& os) {
  os << "# rmtlab report\n";
  os << "# experiment = " << rep.experiment << "\n";
  os << "# potential = " << rep.potential << "\n";
  os << "# grid = " << rep.grid_spec << "\n";
  for (const auto& [k, v] : rep.constants) os << "# " << k << " = " << num(v) << "\n";
  for (const auto& note : rep.notes) os << "# " << note << "\n";
  os << "# decreasing = " << (rep.decreasing ? "true" : "false") << "\n";
  os << "n,N,max_err,mean_err\n";
  for (const auto& r : rep.rows) os << r.n << "," << num(r.N) << "," << num(r.max_err) << "," << num(r.mean_err) << "\n";
  if (!os) throw IoError("failed writing report");
}

void emit_report(const ConvergenceReport& rep, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  emit_report(rep, f);
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace rmtlab
