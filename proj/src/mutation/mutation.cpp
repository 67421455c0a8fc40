#include "conpredict/mutation/mutation.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "conpredict/common/error.hpp"
#include "conpredict/minicc/parser.hpp"
#include "json.hpp"

namespace conpredict::mutation {

using minicc::Builtin;
using minicc::Expr;
using minicc::ExprKind;
using minicc::FunctionDecl;
using minicc::Op;
using minicc::SourceUnit;
using minicc::Stmt;
using minicc::StmtKind;
using minicc::Type;

namespace {

constexpr std::array<std::string_view, 12> kNames{
    "ssdl", "swdd", "oasn", "oeba", "olng", "orrn",
    "rmlock", "rmwait", "rmsig", "rmjoinyld", "shfecs", "spltecs",
};

constexpr std::array<Op, 6> kRelational{Op::Lt, Op::Le, Op::Gt, Op::Ge, Op::Eq, Op::Ne};

Builtin builtin_of(const Stmt& s) {
    if (s.kind != StmtKind::Call || s.expr->kind != ExprKind::Call) return Builtin::None;
    return s.expr->builtin;
}

bool always_returns(const std::vector<Stmt>& stmts);

bool always_returns(const Stmt& s) {
    switch (s.kind) {
        case StmtKind::Return: return true;
        case StmtKind::If: return s.has_else && always_returns(s.body) && always_returns(s.else_body);
        case StmtKind::Block: return always_returns(s.body);
        default: return false;
    }
}

bool always_returns(const std::vector<Stmt>& stmts) {
    return std::any_of(stmts.begin(), stmts.end(), [](const Stmt& s) { return always_returns(s); });
}

/// Calls fn(list, index) for every statement list position in pre-order.
template <typename List, typename Fn>
void for_each_position(List& stmts, Fn&& fn) {
    for (std::size_t i = 0; i < stmts.size(); ++i) {
        fn(stmts, i);
        for_each_position(stmts[i].body, fn);
        for_each_position(stmts[i].else_body, fn);
    }
}

struct Position {
    std::vector<Stmt>* list = nullptr;
    std::size_t index = 0;
};

Position locate(FunctionDecl& f, int id) {
    Position found;
    for_each_position(f.body, [&](std::vector<Stmt>& list, std::size_t i) {
        if (list[i].kind != StmtKind::Block && list[i].id == id) found = {&list, i};
    });
    if (!found.list) throw InternalError("statement " + std::to_string(id) + " not found in " + f.name);
    return found;
}

/// Pre-order walk over an expression, giving each node its index.
template <typename E, typename Fn>
void walk_expr(E& e, int& counter, Fn&& fn) {
    fn(e, counter++);
    for (auto& a : e.args) walk_expr(a, counter, fn);
}

Expr* expr_at(Stmt& s, int index) {
    Expr* found = nullptr;
    int counter = 0;
    walk_expr(*s.expr, counter, [&](Expr& e, int i) {
        if (i == index) found = &e;
    });
    if (!found) throw InternalError("expression index out of range");
    return found;
}

std::string line_of(const Stmt& s) { return "line " + std::to_string(s.loc.line); }

Stmt make_sync_call(Builtin b, const Expr& mutex_arg) {
    Stmt s;
    s.kind = StmtKind::Call;
    Expr call;
    call.kind = ExprKind::Call;
    call.builtin = b;
    call.name = std::string(minicc::builtin_name(b));
    call.type = Type::Void;
    call.args.push_back(mutex_arg);
    s.expr = std::move(call);
    return s;
}

struct LockCall {
    int id;
    bool is_lock;
    std::string mutex;
    const std::vector<Stmt>* list;
    std::size_t index;
};

/// lock/unlock calls of f in pre-order, paired innermost-first per mutex.
struct Pairing {
    std::vector<std::pair<LockCall, LockCall>> pairs;  // sorted by lock id
    std::vector<LockCall> unmatched;
};

Pairing pair_locks(const FunctionDecl& f) {
    std::vector<LockCall> calls;
    for_each_position(f.body, [&](const std::vector<Stmt>& list, std::size_t i) {
        Builtin b = builtin_of(list[i]);
        if (b == Builtin::Lock || b == Builtin::Unlock)
            calls.push_back({list[i].id, b == Builtin::Lock, list[i].expr->args[0].name, &list, i});
    });
    Pairing p;
    std::map<std::string, std::vector<LockCall>> open;
    for (const auto& c : calls) {
        if (c.is_lock) {
            open[c.mutex].push_back(c);
        } else if (auto& stack = open[c.mutex]; !stack.empty()) {
            p.pairs.emplace_back(stack.back(), c);
            stack.pop_back();
        } else {
            p.unmatched.push_back(c);
        }
    }
    for (auto& [m, stack] : open) p.unmatched.insert(p.unmatched.end(), stack.begin(), stack.end());
    std::sort(p.pairs.begin(), p.pairs.end(), [](auto& a, auto& b) { return a.first.id < b.first.id; });
    std::sort(p.unmatched.begin(), p.unmatched.end(), [](auto& a, auto& b) { return a.id < b.id; });
    return p;
}

/// Matched pairs whose lock and unlock sit in the same list with k >= 2
/// statements between them.
std::vector<std::pair<LockCall, LockCall>> critical_sections(const FunctionDecl& f) {
    std::vector<std::pair<LockCall, LockCall>> out;
    for (const auto& [l, u] : pair_locks(f).pairs)
        if (l.list == u.list && u.index > l.index + 2) out.emplace_back(l, u);
    return out;
}

void sites_for_function(const SourceUnit& unit, const FunctionDecl& f, Operator op,
                        const MutationOptions& options, std::vector<Site>& out,
                        EnumerationReport* report) {
    int index = 0;
    auto add = [&](std::vector<int> stmts, std::vector<int> variants, std::string description, int expr_index = -1) {
        if (variants.empty()) return;
        Site s;
        s.op = op;
        s.function = f.name;
        s.index = index++;
        s.stmts = std::move(stmts);
        s.variants = std::move(variants);
        s.description = std::move(description);
        s.expr_index = expr_index;
        out.push_back(std::move(s));
    };
    auto each_stmt = [&](auto&& fn) {
        minicc::for_each_stmt(f.body, [&](const Stmt& s, int) {
            if (s.kind != StmtKind::Block) fn(s);
        });
    };
    switch (op) {
        case Operator::Ssdl:
            each_stmt([&](const Stmt& s) {
                Builtin b = builtin_of(s);
                const bool deletable =
                    s.kind == StmtKind::Assign ||
                    (s.kind == StmtKind::Call &&
                     (b == Builtin::None || b == Builtin::Print || b == Builtin::Assert));
                if (deletable) add({s.id}, {0}, "delete statement at " + line_of(s));
            });
            break;
        case Operator::Swdd:
            each_stmt([&](const Stmt& s) {
                if (s.kind == StmtKind::While && !always_returns(s.body))
                    add({s.id}, {0}, "while to do-while at " + line_of(s));
            });
            break;
        case Operator::Oasn:
        case Operator::Orrn:
            each_stmt([&](const Stmt& s) {
                if (!s.expr) return;
                int counter = 0;
                walk_expr(*s.expr, counter, [&](const Expr& e, int i) {
                    if (e.kind != ExprKind::Binary) return;
                    if (op == Operator::Oasn && minicc::is_arithmetic(e.op)) {
                        add({s.id}, {0, 1}, "arithmetic '" + std::string(op_text(e.op)) + "' to shift at " + line_of(s), i);
                    } else if (op == Operator::Orrn && minicc::is_relational(e.op) &&
                               e.args[0].type == Type::Int) {
                        add({s.id}, {0, 1, 2, 3, 4}, "relational '" + std::string(op_text(e.op)) + "' at " + line_of(s), i);
                    }
                });
            });
            break;
        case Operator::Oeba:
            each_stmt([&](const Stmt& s) {
                if (s.kind == StmtKind::Assign && s.assign_op == minicc::AssignOp::Set &&
                    s.target_type == Type::Int && s.expr->kind != ExprKind::Call &&
                    s.expr->kind != ExprKind::Spawn)
                    add({s.id}, options.oeba_and ? std::vector<int>{0, 1} : std::vector<int>{0},
                        "plain to bitwise assignment at " + line_of(s));
            });
            break;
        case Operator::Olng:
            each_stmt([&](const Stmt& s) {
                if (s.kind == StmtKind::If || s.kind == StmtKind::While || s.kind == StmtKind::DoWhile)
                    add({s.id}, {0}, "negate condition at " + line_of(s));
            });
            break;
        case Operator::Rmlock: {
            Pairing p = pair_locks(f);
            if (report)
                for (const auto& c : p.unmatched)
                    report->unmatched.push_back(f.name + ":" + std::to_string(c.id) + " " +
                                                (c.is_lock ? "lock(" : "unlock(") + c.mutex + ")");
            if (options.rmlock_single) {
                each_stmt([&](const Stmt& s) {
                    Builtin b = builtin_of(s);
                    if (b == Builtin::Lock || b == Builtin::Unlock)
                        add({s.id}, {0}, "remove " + std::string(builtin_name(b)) + " at " + line_of(s));
                });
            } else {
                for (const auto& [l, u] : p.pairs)
                    add({l.id, u.id}, {0}, "remove lock/unlock pair on " + l.mutex);
            }
            break;
        }
        case Operator::Rmwait:
        case Operator::Rmsig:
        case Operator::Rmjoinyld:
            each_stmt([&](const Stmt& s) {
                Builtin b = builtin_of(s);
                bool hit = (op == Operator::Rmwait && (b == Builtin::Wait || b == Builtin::TimedWait)) ||
                           (op == Operator::Rmsig && (b == Builtin::Signal || b == Builtin::Broadcast)) ||
                           (op == Operator::Rmjoinyld && (b == Builtin::Join || b == Builtin::Yield));
                if (hit) add({s.id}, {0}, "remove " + std::string(builtin_name(b)) + " at " + line_of(s));
            });
            break;
        case Operator::Shfecs:
            for (const auto& [l, u] : critical_sections(f)) {
                const auto& list = *l.list;
                std::vector<int> variants;
                std::vector<int> touched{l.id, u.id};
                // Later: the first enclosed statement leaves, the next one joins.
                if (u.index + 1 < list.size() && !always_returns(list[u.index + 1])) {
                    variants.push_back(0);
                    touched.push_back(list[l.index + 1].id);
                    touched.push_back(list[u.index + 1].id);
                }
                // Earlier: the previous statement joins, the last enclosed leaves.
                if (l.index > 0) {
                    variants.push_back(1);
                    touched.push_back(list[l.index - 1].id);
                    touched.push_back(list[u.index - 1].id);
                }
                std::sort(touched.begin(), touched.end());
                touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
                add(touched, variants, "shift critical section on " + l.mutex);
            }
            break;
        case Operator::Spltecs:
            for (const auto& [l, u] : critical_sections(f)) {
                const std::size_t k = u.index - l.index - 1;
                const Stmt& mid = (*l.list)[l.index + k / 2];
                add({mid.id}, {0}, "split critical section on " + l.mutex + " after " + line_of(mid));
            }
            break;
    }
    (void)unit;
}

/// Applies one variant of a site to a copy of the unit.
SourceUnit apply(const SourceUnit& original, const Site& site, int variant, const MutationOptions& options) {
    SourceUnit u = original;
    FunctionDecl& f = u.functions[u.function_index(site.function)];
    switch (site.op) {
        case Operator::Ssdl:
        case Operator::Rmwait:
        case Operator::Rmsig:
        case Operator::Rmjoinyld: {
            Position p = locate(f, site.stmts[0]);
            p.list->erase(p.list->begin() + static_cast<std::ptrdiff_t>(p.index));
            break;
        }
        case Operator::Rmlock: {
            // Erase the later statement first so the earlier position stays valid.
            std::vector<int> ids = site.stmts;
            std::sort(ids.rbegin(), ids.rend());
            for (int id : ids) {
                Position p = locate(f, id);
                p.list->erase(p.list->begin() + static_cast<std::ptrdiff_t>(p.index));
            }
            break;
        }
        case Operator::Swdd: {
            Position p = locate(f, site.stmts[0]);
            (*p.list)[p.index].kind = StmtKind::DoWhile;
            break;
        }
        case Operator::Oasn: {
            Position p = locate(f, site.stmts[0]);
            expr_at((*p.list)[p.index], site.expr_index)->op = variant == 0 ? Op::Shl : Op::Shr;
            break;
        }
        case Operator::Orrn: {
            Position p = locate(f, site.stmts[0]);
            Expr* e = expr_at((*p.list)[p.index], site.expr_index);
            std::vector<Op> others;
            for (Op o : kRelational)
                if (o != e->op) others.push_back(o);
            e->op = others.at(static_cast<std::size_t>(variant));
            break;
        }
        case Operator::Oeba: {
            Position p = locate(f, site.stmts[0]);
            (*p.list)[p.index].assign_op = variant == 0 ? minicc::AssignOp::OrSet : minicc::AssignOp::AndSet;
            (void)options;
            break;
        }
        case Operator::Olng: {
            Position p = locate(f, site.stmts[0]);
            Stmt& s = (*p.list)[p.index];
            Expr neg;
            neg.kind = ExprKind::Unary;
            neg.op = Op::Not;
            neg.type = Type::Bool;
            neg.args.push_back(std::move(*s.expr));
            s.expr = std::move(neg);
            break;
        }
        case Operator::Shfecs: {
            // stmts holds the lock id first (smallest touched id is either the
            // lock or the statement before it); find the section explicitly.
            const Pairing pairing = pair_locks(f);
            const std::pair<LockCall, LockCall>* section = nullptr;
            for (const auto& pr : pairing.pairs)
                if (std::find(site.stmts.begin(), site.stmts.end(), pr.first.id) != site.stmts.end() &&
                    std::find(site.stmts.begin(), site.stmts.end(), pr.second.id) != site.stmts.end())
                    section = &pr;
            if (!section) throw InternalError("shfecs section vanished");
            Position lp = locate(f, section->first.id);
            std::vector<Stmt>& list = *lp.list;
            const std::size_t li = lp.index;
            const std::size_t ui = locate(f, section->second.id).index;
            if (variant == 0) {
                // [lock, s1..sk, unlock, n1] -> [s1, lock, s2..sk, n1, unlock]
                std::swap(list[li], list[li + 1]);
                std::swap(list[ui], list[ui + 1]);
            } else {
                // [p, lock, s1..sk, unlock] -> [lock, p, s1..sk-1, unlock, sk]
                std::swap(list[li - 1], list[li]);
                std::swap(list[ui - 1], list[ui]);
            }
            break;
        }
        case Operator::Spltecs: {
            Position p = locate(f, site.stmts[0]);
            // The section's mutex: the nearest preceding lock in the same list.
            const Expr* mutex = nullptr;
            for (std::size_t i = p.index + 1; i-- > 0;) {
                const Stmt& s = (*p.list)[i];
                if (builtin_of(s) == Builtin::Lock) {
                    mutex = &s.expr->args[0];
                    break;
                }
            }
            if (!mutex) throw InternalError("spltecs site without lock");
            const Expr m = *mutex;
            auto at = p.list->begin() + static_cast<std::ptrdiff_t>(p.index + 1);
            at = p.list->insert(at, make_sync_call(Builtin::Unlock, m));
            p.list->insert(at + 1, make_sync_call(Builtin::Lock, m));
            break;
        }
    }
    return u;
}

}  // namespace

std::string_view operator_name(Operator op) { return kNames[static_cast<std::size_t>(op)]; }

Operator operator_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return kAllOperators[i];
    throw InputError("unknown mutation operator '" + std::string(name) + "'");
}

bool is_concurrency_operator(Operator op) { return static_cast<int>(op) >= static_cast<int>(Operator::Rmlock); }

std::vector<Operator> parse_operator_list(std::string_view text) {
    std::vector<Operator> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view item = text.substr(start, end - start);
        if (item == "all" || item == "seq" || item == "con") {
            for (Operator op : kAllOperators)
                if (item == "all" || (item == "con") == is_concurrency_operator(op)) out.push_back(op);
        } else if (!item.empty()) {
            out.push_back(operator_from_name(item));
        }
        start = end + 1;
    }
    std::vector<Operator> unique;
    for (Operator op : kAllOperators)
        if (std::find(out.begin(), out.end(), op) != out.end()) unique.push_back(op);
    return unique;
}

std::vector<Site> enumerate_sites(const SourceUnit& u, Operator op, const MutationOptions& options,
                                  EnumerationReport* report) {
    std::vector<Site> out;
    for (const auto& f : u.functions) sites_for_function(u, f, op, options, out, report);
    return out;
}

std::vector<Mutant> generate_mutants(const SourceUnit& u, const std::vector<Operator>& ops,
                                     const MutationOptions& options, std::optional<std::string> function) {
    if (function && !u.find_function(*function)) throw InputError("unknown function '" + *function + "'");
    std::vector<Mutant> out;
    for (Operator op : ops) {
        for (const Site& site : enumerate_sites(u, op, options)) {
            if (function && site.function != *function) continue;
            for (int variant : site.variants) {
                Mutant m;
                m.op = op;
                m.function = site.function;
                m.site = site.index;
                m.variant = variant;
                m.id = std::string(operator_name(op)) + ":" + site.function + ":" + std::to_string(site.index) +
                       ":" + std::to_string(variant);
                m.touched = site.stmts;
                m.description = site.description;
                if (op == Operator::Oasn) m.description += variant == 0 ? " (<<)" : " (>>)";
                if (op == Operator::Shfecs) m.description += variant == 0 ? " (later)" : " (earlier)";
                m.source = minicc::print(apply(u, site, variant, options));
                try {
                    m.unit = minicc::parse(m.source);
                } catch (const ParseError& e) {
                    throw InternalError("mutant " + m.id + " does not parse: " + e.what());
                }
                out.push_back(std::move(m));
            }
        }
    }
    return out;
}

int MuSRecord::total() const {
    int t = 0;
    for (int c : counts) t += c;
    return t;
}

MuSRecord static_mutation_metrics(const std::vector<Mutant>& mutants, std::string_view function) {
    MuSRecord r;
    for (const auto& m : mutants)
        if (m.function == function) ++r.counts[static_cast<std::size_t>(m.op)];
    return r;
}

std::string mutant_file_name(const Mutant& m) {
    return std::string(operator_name(m.op)) + "_" + m.function + "_" + std::to_string(m.site) + "_" +
           std::to_string(m.variant) + ".mcc";
}

std::string manifest_json(const std::vector<Mutant>& mutants, const std::vector<std::string>& files) {
    using json = nlohmann::ordered_json;
    json doc = json::array();
    for (std::size_t i = 0; i < mutants.size(); ++i) {
        const Mutant& m = mutants[i];
        doc.push_back({{"id", m.id},
                       {"operator", operator_name(m.op)},
                       {"function", m.function},
                       {"site", m.site},
                       {"variant", m.variant},
                       {"touched", m.touched},
                       {"description", m.description},
                       {"file", i < files.size() ? files[i] : mutant_file_name(m)}});
    }
    return json({{"version", 1}, {"mutants", doc}}).dump(2) + "\n";
}

std::vector<Mutant> load_manifest(const std::string& path) {
    using json = nlohmann::json;
    std::ifstream in(path);
    if (!in) throw InputError("cannot open manifest " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    std::vector<Mutant> out;
    try {
        for (const auto& entry : doc.at("mutants")) {
            Mutant m;
            m.id = entry.at("id").get<std::string>();
            m.op = operator_from_name(entry.at("operator").get<std::string>());
            m.function = entry.at("function").get<std::string>();
            m.site = entry.at("site").get<int>();
            m.variant = entry.at("variant").get<int>();
            m.touched = entry.at("touched").get<std::vector<int>>();
            m.description = entry.value("description", "");
            const auto file = (dir / entry.at("file").get<std::string>()).string();
            m.unit = minicc::parse_file(file);
            m.source = minicc::print(m.unit);
            out.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    return out;
}

}  // namespace conpredict::mutation
