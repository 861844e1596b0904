#include "rsfbl/solution.hpp"

#include "json.hpp"

namespace rsfbl::core {

using nlohmann::json;

namespace {

json complex_matrix(const Eigen::MatrixXcd& m) {
    json cols = json::array();
    for (int c = 0; c < m.cols(); ++c) {
        json col = json::array();
        for (int r = 0; r < m.rows(); ++r) {
            col.push_back({m(r, c).real(), m(r, c).imag()});
        }
        cols.push_back(col);
    }
    return cols;
}

Eigen::MatrixXcd complex_matrix_from(const json& cols) {
    int nc = static_cast<int>(cols.size());
    int nr = nc > 0 ? static_cast<int>(cols.at(0).size()) : 0;
    Eigen::MatrixXcd m(nr, nc);
    for (int c = 0; c < nc; ++c) {
        for (int r = 0; r < nr; ++r) {
            m(r, c) = {cols.at(c).at(r).at(0).get<double>(),
                       cols.at(c).at(r).at(1).get<double>()};
        }
    }
    return m;
}

}  // namespace

std::string solution_to_json(const Solution& s) {
    json j;
    j["precoders"] = complex_matrix(s.precoders);
    j["common_split"] = std::vector<double>(s.common_split.data(),
                                            s.common_split.data() + s.common_split.size());
    j["l_d"] = s.l_d;
    j["l_c"] = s.l_c;
    j["theta"] = s.theta;
    j["group_rates"] = std::vector<double>(s.group_rates.data(),
                                           s.group_rates.data() + s.group_rates.size());
    j["common_rate"] = s.common_rate;
    j["mmf"] = s.mmf;
    j["objective"] = s.objective;
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    j["objective_trace"] = s.objective_trace;
    return j.dump(2);
}

Solution solution_from_json(const std::string& text) {
    json j = json::parse(text);
    Solution s;
    s.precoders = complex_matrix_from(j.at("precoders"));
    auto cs = j.at("common_split").get<std::vector<double>>();
    s.common_split = Eigen::Map<Eigen::VectorXd>(cs.data(), cs.size());
    s.l_d = j.at("l_d").get<long>();
    s.l_c = j.at("l_c").get<long>();
    s.theta = j.at("theta").get<double>();
    auto gr = j.at("group_rates").get<std::vector<double>>();
    s.group_rates = Eigen::Map<Eigen::VectorXd>(gr.data(), gr.size());
    s.common_rate = j.at("common_rate").get<double>();
    s.mmf = j.at("mmf").get<double>();
    s.objective = j.at("objective").get<double>();
    s.iterations = j.at("iterations").get<int>();
    s.converged = j.at("converged").get<bool>();
    s.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    return s;
}

}  // namespace rsfbl::core
