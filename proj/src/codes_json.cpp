#include <stdexcept>

#include "json.hpp"
#include "qec3d/codes.hpp"

namespace qec3d {

namespace {

using nlohmann::json;

json op_to_json(const PauliOperator& op) {
    json terms = json::array();
    for (const auto& t : op.terms()) terms.push_back({t.qubit, std::string(1, to_char(t.letter))});
    return terms;
}

PauliOperator op_from_json(const json& j, std::size_t n) {
    std::vector<PauliOperator::Term> terms;
    for (const auto& t : j) {
        const auto letter = t.at(1).get<std::string>();
        if (letter.size() != 1) throw std::invalid_argument("code json: bad Pauli letter");
        terms.push_back({t.at(0).get<std::uint32_t>(), pauli_from_char(letter[0])});
    }
    return PauliOperator(n, std::move(terms));
}

}  // namespace

std::string code_to_json(const StabilizerCode& code) {
    json j;
    j["family"] = code.family;
    j["dims"] = code.dims;
    j["boundary"] = to_string(code.boundary);
    j["deformation"] = code.deformation;
    j["n"] = code.n;
    json stabs = json::array();
    for (std::size_t i = 0; i < code.stabilizers.size(); ++i) {
        stabs.push_back({{"sector", code.sectors[i]}, {"terms", op_to_json(code.stabilizers[i])}});
    }
    j["stabilizers"] = std::move(stabs);
    json logicals = json::array();
    for (const auto& l : code.logicals) logicals.push_back({{"x", op_to_json(l.x)}, {"z", op_to_json(l.z)}});
    j["logicals"] = std::move(logicals);
    json coords = json::array();
    for (const auto& c : code.coords) {
        coords.push_back({{"pos", c.pos}, {"axis", c.axis}, {"sublattice", c.sublattice}, {"vertical", c.vertical}});
    }
    j["coords"] = std::move(coords);
    json frame = json::array();
    for (const auto& f : code.frame) frame.push_back(f.name());
    j["frame"] = std::move(frame);
    return j.dump();
}

StabilizerCode code_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("code json: ") + e.what());
    }
    try {
        StabilizerCode code;
        code.family = j.at("family").get<std::string>();
        code.dims = j.at("dims").get<std::array<int, 3>>();
        code.boundary = parse_boundary(j.at("boundary").get<std::string>());
        code.deformation = j.at("deformation").get<std::string>();
        code.n = j.at("n").get<std::size_t>();
        for (const auto& s : j.at("stabilizers")) {
            code.sectors.push_back(s.at("sector").get<std::string>());
            code.stabilizers.push_back(op_from_json(s.at("terms"), code.n));
        }
        for (const auto& l : j.at("logicals")) {
            code.logicals.push_back({op_from_json(l.at("x"), code.n), op_from_json(l.at("z"), code.n)});
        }
        for (const auto& c : j.at("coords")) {
            code.coords.push_back({c.at("pos").get<std::array<int, 3>>(), c.at("axis").get<int>(),
                                   c.at("sublattice").get<int>(), c.at("vertical").get<bool>()});
        }
        for (const auto& f : j.at("frame")) code.frame.push_back(AxisPerm::from_name(f.get<std::string>()));
        return code;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("code json: ") + e.what());
    }
}

}  // namespace qec3d
