#include "hyperc/artifact_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hyperc/errors.hpp"

namespace hyperc {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_matrix(std::ostream& out, const char* label, const Eigen::MatrixXd& m) {
    out << label << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j ? " " : "") << format_full(m(i, j));
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& expected_label) {
    std::string label;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> label >> rows >> cols) || label != expected_label)
        throw ConfigError("controller artifact: expected matrix \"" + expected_label + "\"");
    if (rows < 0 || cols < 0)
        throw ConfigError("controller artifact: negative matrix dimension");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (!(in >> m(i, j)))
                throw ConfigError("controller artifact: truncated matrix " + expected_label);
    return m;
}

} // namespace

void write_controller_artifact(const std::string& path, const ControllerArtifact& artifact) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write controller artifact: " + path);
    out << kControllerSchema << '\n';
    out << "h " << format_full(artifact.controller.period) << '\n';
    out << "M " << artifact.M << '\n';
    out << "gamma " << format_full(artifact.gamma) << '\n';
    write_matrix(out, "A", artifact.controller.A);
    write_matrix(out, "B", artifact.controller.B);
    write_matrix(out, "C", artifact.controller.C);
    write_matrix(out, "D", artifact.controller.D);
}

ControllerArtifact read_controller_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open controller artifact: " + path);
    std::string schema;
    std::getline(in, schema);
    if (schema != kControllerSchema)
        throw ConfigError("controller artifact: unknown schema \"" + schema + "\"");
    std::string key;
    double h = 0.0, gamma = 0.0;
    int M = 0;
    if (!(in >> key >> h) || key != "h")
        throw ConfigError("controller artifact: expected h");
    if (!(in >> key >> M) || key != "M")
        throw ConfigError("controller artifact: expected M");
    if (!(in >> key >> gamma) || key != "gamma")
        throw ConfigError("controller artifact: expected gamma");
    ControllerArtifact a;
    const Eigen::MatrixXd A = read_matrix(in, "A");
    const Eigen::MatrixXd B = read_matrix(in, "B");
    const Eigen::MatrixXd C = read_matrix(in, "C");
    const Eigen::MatrixXd D = read_matrix(in, "D");
    a.controller = DiscreteStateSpace(A, B, C, D, h);
    a.M = M;
    a.gamma = gamma;
    if (a.controller.inputs() != 1 || a.controller.outputs() != M)
        throw ConfigError("controller artifact: port counts do not match M");
    return a;
}

void write_trajectory_csv(const std::string& path, const SimulationResult& result) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write CSV: " + path);
    out << "t,r,r_delayed,target_normalized,y,e_tilde,u\n";
    for (Eigen::Index i = 0; i < result.t.size(); ++i) {
        out << format_full(result.t[i]) << ',' << format_full(result.r[i]) << ','
            << format_full(result.r_delayed[i]) << ',' << format_full(result.target_normalized[i])
            << ',' << format_full(result.y[i]) << ',' << format_full(result.e_tilde[i]) << ','
            << format_full(result.u[i]) << '\n';
    }
}

} // namespace hyperc
