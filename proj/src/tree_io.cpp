#include "hgtree/tree_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace hgt {

using nlohmann::json;

namespace {

json node_json(const EdgeTree& t, int v) {
    json kids = json::array();
    for (int i = 0; i < t.num_children(v); ++i) kids.push_back(node_json(t, t.child(v, i)));
    return json{{"stem", t.stem(v)}, {"children", std::move(kids)}};
}

void read_node(const json& j, int parent, std::vector<int>& par, std::vector<double>& st) {
    if (!j.is_object()) throw TreeError("tree json: node must be an object");
    double s = j.value("stem", 0.0);
    int id = static_cast<int>(par.size());
    par.push_back(parent);
    st.push_back(s);
    if (j.contains("children")) {
        if (!j["children"].is_array()) throw TreeError("tree json: children must be an array");
        for (const auto& c : j["children"]) read_node(c, id, par, st);
    }
}

void newick_node(const EdgeTree& t, int v, std::string& out) {
    if (t.num_children(v) > 0) {
        out += '(';
        for (int i = 0; i < t.num_children(v); ++i) {
            if (i) out += ',';
            newick_node(t, t.child(v, i), out);
        }
        out += ')';
    }
    out += fmt::format(":{:.17g}", t.stem(v));
}

struct NewickParser {
    const std::string& s;
    std::size_t i = 0;
    std::vector<int> par;
    std::vector<double> st;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    void node(int parent) {
        int id = static_cast<int>(par.size());
        par.push_back(parent);
        st.push_back(0.0);
        skip();
        if (i < s.size() && s[i] == '(') {
            ++i;
            for (;;) {
                node(id);
                skip();
                if (i < s.size() && s[i] == ',') {
                    ++i;
                    continue;
                }
                if (i < s.size() && s[i] == ')') {
                    ++i;
                    break;
                }
                throw TreeError("newick: expected ',' or ')'");
            }
        }
        skip();
        while (i < s.size() && std::string_view(",():;").find(s[i]) == std::string_view::npos &&
               !std::isspace(static_cast<unsigned char>(s[i])))
            ++i;  // label, ignored
        skip();
        if (i < s.size() && s[i] == ':') {
            ++i;
            skip();
            std::size_t j = i;
            while (j < s.size() && std::string_view("+-.eE0123456789").find(s[j]) != std::string_view::npos) ++j;
            double x = 0.0;
            auto r = std::from_chars(s.data() + i, s.data() + j, x);
            if (r.ec != std::errc() || r.ptr != s.data() + j) throw TreeError("newick: bad branch length");
            st[id] = x;
            i = j;
        }
    }
};

}  // namespace

std::string to_json(const EdgeTree& t, int indent) { return node_json(t, 0).dump(indent); }

EdgeTree tree_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw TreeError(std::string("tree json: ") + e.what());
    }
    std::vector<int> par;
    std::vector<double> st;
    read_node(j, -1, par, st);
    return EdgeTree::from_parents(par, st);
}

std::string to_newick(const EdgeTree& t) {
    std::string out;
    newick_node(t, 0, out);
    out += ';';
    return out;
}

EdgeTree tree_from_newick(const std::string& text) {
    NewickParser p{text, 0, {}, {}};
    p.node(-1);
    p.skip();
    if (p.i < text.size() && text[p.i] == ';') ++p.i;
    p.skip();
    if (p.i != text.size()) throw TreeError("newick: trailing characters");
    return EdgeTree::from_parents(p.par, p.st);
}

EdgeTree load_tree(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TreeError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string s = ss.str();
    auto k = s.find_first_not_of(" \t\r\n");
    if (k != std::string::npos && s[k] == '{') return tree_from_json(s);
    return tree_from_newick(s);
}

void save_tree(const std::string& path, const EdgeTree& t) {
    std::ofstream out(path);
    if (!out) throw TreeError("cannot write " + path);
    if (path.size() > 4 && (path.ends_with(".nwk") || path.ends_with(".tre")))
        out << to_newick(t) << '\n';
    else
        out << to_json(t) << '\n';
}

}  // namespace hgt
