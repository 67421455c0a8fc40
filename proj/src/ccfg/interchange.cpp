#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "conpredict/ccfg/ccfg.hpp"
#include "conpredict/common/error.hpp"
#include "json.hpp"

namespace conpredict::ccfg {

using json = nlohmann::ordered_json;

namespace {

std::string_view access_name(Access a) { return a == Access::Read ? "read" : "write"; }

minicc::Type parse_type(const std::string& s) {
    if (s == "int") return minicc::Type::Int;
    if (s == "bool") return minicc::Type::Bool;
    throw InputError("shared variable type must be int or bool, found '" + s + "'");
}

}  // namespace

std::string dump_ccfg(const Ccfg& c) {
    json doc;
    doc["functions"] = json::array();
    for (const auto& f : c.functions)
        doc["functions"].push_back({{"name", f.name}, {"entry", f.entry}, {"exit", f.exit}});
    doc["nodes"] = json::array();
    for (const auto& n : c.nodes) {
        json acc = json::array();
        for (const auto& a : n.sv_accesses) acc.push_back({{"var", a.var}, {"access", access_name(a.access)}});
        doc["nodes"].push_back({{"id", n.id},
                                {"function", n.function},
                                {"kind", n.kind},
                                {"weight", n.weight},
                                {"sv_accesses", acc}});
    }
    doc["local_edges"] = json::array();
    for (auto [a, b] : c.local_edges) doc["local_edges"].push_back({{"from", a}, {"to", b}});
    doc["cross_edges"] = json::array();
    for (const auto& e : c.cross_edges) {
        json j = {{"from", e.from}, {"to", e.to}, {"kind", edge_kind_name(e.kind)}};
        if (e.kind == EdgeKind::Comm) j["var"] = e.var;
        doc["cross_edges"].push_back(j);
    }
    doc["shared_vars"] = json::array();
    for (const auto& v : c.shared_vars)
        doc["shared_vars"].push_back({{"name", v.name}, {"type", minicc::type_name(v.type)}});
    doc["threads"] = json::array();
    for (const auto& t : c.threads) doc["threads"].push_back({{"spawn", t.spawn_node}, {"target", t.target}});
    return doc.dump(2) + "\n";
}

Ccfg load_ccfg(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed ccfg document: ") + e.what());
    }
    Ccfg c;
    try {
        for (const auto& f : doc.at("functions"))
            c.functions.push_back({f.at("name").get<std::string>(), f.at("entry").get<int>(), f.at("exit").get<int>()});
        for (const auto& n : doc.at("nodes")) {
            Node node{n.at("id").get<int>(), n.at("function").get<std::string>(),
                      n.at("kind").get<std::string>(), n.value("weight", 1), {}};
            for (const auto& a : n.value("sv_accesses", json::array())) {
                const std::string kind = a.at("access").get<std::string>();
                if (kind != "read" && kind != "write")
                    throw InputError("node " + std::to_string(node.id) + ": unknown access kind '" + kind + "'");
                node.sv_accesses.push_back({a.at("var").get<std::string>(), kind == "read" ? Access::Read : Access::Write});
            }
            std::sort(node.sv_accesses.begin(), node.sv_accesses.end());
            node.sv_accesses.erase(std::unique(node.sv_accesses.begin(), node.sv_accesses.end()),
                                   node.sv_accesses.end());
            c.nodes.push_back(std::move(node));
        }
        for (const auto& e : doc.at("local_edges"))
            c.local_edges.emplace_back(e.at("from").get<int>(), e.at("to").get<int>());
        for (const auto& e : doc.at("cross_edges")) {
            CrossEdge edge{e.at("from").get<int>(), e.at("to").get<int>(), EdgeKind::Fork, ""};
            const std::string kind = e.at("kind").get<std::string>();
            if (kind == "fork") {
                edge.kind = EdgeKind::Fork;
            } else if (kind == "join") {
                edge.kind = EdgeKind::Join;
            } else if (kind == "comm") {
                edge.kind = EdgeKind::Comm;
                edge.var = e.at("var").get<std::string>();
            } else {
                throw InputError("unknown cross edge kind '" + kind + "'");
            }
            c.cross_edges.push_back(edge);
        }
        for (const auto& v : doc.value("shared_vars", json::array()))
            c.shared_vars.push_back({v.at("name").get<std::string>(), parse_type(v.at("type").get<std::string>())});
        for (const auto& t : doc.value("threads", json::array()))
            c.threads.push_back({t.at("spawn").get<int>(), t.at("target").get<std::string>()});
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed ccfg document: ") + e.what());
    }

    std::sort(c.nodes.begin(), c.nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < c.nodes.size(); ++i)
        if (c.nodes[i].id == c.nodes[i - 1].id)
            throw InputError("duplicate node id " + std::to_string(c.nodes[i].id));
    std::set<std::string> names;
    for (const auto& f : c.functions)
        if (!names.insert(f.name).second) throw InputError("duplicate function '" + f.name + "'");
    auto require = [&](int id, const std::string& where) -> const Node& {
        const Node* n = c.find_node(id);
        if (!n) throw InputError("dangling node reference " + std::to_string(id) + " in " + where);
        return *n;
    };
    for (const auto& n : c.nodes) {
        if (!names.count(n.function))
            throw InputError("node " + std::to_string(n.id) + " names unknown function '" + n.function + "'");
        if (n.weight < 1) throw InputError("node " + std::to_string(n.id) + " has a non-positive weight");
    }
    for (const auto& f : c.functions) {
        if (require(f.entry, "entry of " + f.name).function != f.name ||
            require(f.exit, "exit of " + f.name).function != f.name)
            throw InputError("entry/exit of '" + f.name + "' belongs to another function");
    }
    for (auto [a, b] : c.local_edges) {
        const std::string where = "local edge " + std::to_string(a) + "->" + std::to_string(b);
        if (require(a, where).function != require(b, where).function)
            throw InputError(where + " crosses functions");
    }
    for (const auto& e : c.cross_edges) {
        const std::string where = std::string(edge_kind_name(e.kind)) + " edge " + std::to_string(e.from) +
                                  "->" + std::to_string(e.to);
        require(e.from, where);
        require(e.to, where);
    }
    for (const auto& t : c.threads) {
        require(t.spawn_node, "thread site");
        if (!names.count(t.target)) throw InputError("thread target '" + t.target + "' is not a function");
    }
    std::sort(c.local_edges.begin(), c.local_edges.end());
    c.local_edges.erase(std::unique(c.local_edges.begin(), c.local_edges.end()), c.local_edges.end());
    std::sort(c.cross_edges.begin(), c.cross_edges.end());
    c.cross_edges.erase(std::unique(c.cross_edges.begin(), c.cross_edges.end()), c.cross_edges.end());
    std::sort(c.threads.begin(), c.threads.end());
    return c;
}

Ccfg load_ccfg_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_ccfg(ss.str());
}

}  // namespace conpredict::ccfg
