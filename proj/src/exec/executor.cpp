#include "conpredict/exec/executor.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "conpredict/common/error.hpp"

namespace conpredict::exec {

using minicc::Builtin;
using minicc::Expr;
using minicc::ExprKind;
using minicc::Op;
using minicc::Stmt;
using minicc::StmtKind;
using minicc::Type;

namespace {

/// Division by zero; aborts the run with Status::RuntimeError.
struct Fault {
    std::string message;
};

std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::int64_t shift(Op op, std::int64_t a, std::int64_t b) {
    if (b < 0 || b > 63) return op == Op::Shl ? 0 : (a < 0 ? -1 : 0);
    if (op == Op::Shl) return wrap(static_cast<std::uint64_t>(a) << b);
    return a >> b;
}

std::string format_value(std::int64_t v, Type t) {
    if (t == Type::Bool) return v ? "true" : "false";
    return std::to_string(v);
}

}  // namespace

std::string_view status_name(Status s) {
    switch (s) {
        case Status::Ok: return "ok";
        case Status::AssertionFailure: return "assertion-failure";
        case Status::Deadlock: return "deadlock";
        case Status::StepLimit: return "step-limit";
        case Status::RuntimeError: return "runtime-error";
    }
    return "?";
}

std::string RunOutcome::observable() const {
    std::string out(status_name(status));
    out += '|';
    for (std::size_t i = 0; i < prints.size(); ++i) {
        if (i) out += ',';
        out += prints[i];
    }
    out += '|';
    for (std::size_t i = 0; i < globals.size(); ++i) {
        if (i) out += ',';
        out += globals[i].first + "=" + std::to_string(globals[i].second);
    }
    return out;
}

bool RunOutcome::reached(int function, const std::vector<int>& nodes) const {
    if (function < 0 || static_cast<std::size_t>(function) >= covered.size()) return false;
    const auto& c = covered[static_cast<std::size_t>(function)];
    return std::any_of(nodes.begin(), nodes.end(), [&](int n) {
        return n >= 0 && static_cast<std::size_t>(n) < c.size() && c[static_cast<std::size_t>(n)];
    });
}

SeededScheduler::SeededScheduler(std::uint64_t seed) : rng_(seed) {}

std::size_t SeededScheduler::choose(const std::vector<int>& enabled) { return rng_.below(enabled.size()); }

// ---------------------------------------------------------------------------
// Test manifests

std::vector<TestCase> parse_tests(std::string_view text) {
    std::vector<TestCase> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string word;
        TestCase t;
        bool have_entry = false;
        bool observing = false;
        while (words >> word) {
            if (!have_entry) {
                t.entry = word;
                have_entry = true;
            } else if (word == "|") {
                if (observing) throw InputError("test line " + std::to_string(line_no) + ": repeated '|'");
                observing = true;
            } else if (observing) {
                t.observe.push_back(word);
            } else if (word == "true" || word == "false") {
                t.args.push_back(word == "true");
            } else {
                try {
                    std::size_t used = 0;
                    long long v = std::stoll(word, &used);
                    if (used != word.size()) throw std::invalid_argument(word);
                    t.args.push_back(v);
                } catch (const std::exception&) {
                    throw InputError("test line " + std::to_string(line_no) + ": bad argument literal '" +
                                     word + "'");
                }
            }
        }
        if (!have_entry) continue;
        t.id = "t" + std::to_string(out.size() + 1);
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<TestCase> load_tests(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open test manifest " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_tests(buf.str());
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Interpreter

struct Program::Impl {
    struct Function {
        const minicc::FunctionDecl* decl = nullptr;
        minicc::Cfg cfg;
        std::vector<const Stmt*> stmt;  // by node id
        std::vector<int> callee;        // by node id, -1 when the node calls nothing
        int first = 0;                  // node reached on entry
    };

    minicc::SourceUnit unit;
    std::vector<Function> functions;
    std::map<std::string, int, std::less<>> by_name;

    explicit Impl(const minicc::SourceUnit& u) : unit(u) {
        functions.resize(unit.functions.size());
        for (std::size_t i = 0; i < unit.functions.size(); ++i)
            by_name.emplace(unit.functions[i].name, static_cast<int>(i));
        for (std::size_t i = 0; i < unit.functions.size(); ++i) {
            Function& f = functions[i];
            f.decl = &unit.functions[i];
            f.cfg = minicc::lower_to_cfg(*f.decl);
            f.stmt.assign(f.cfg.nodes.size(), nullptr);
            f.callee.assign(f.cfg.nodes.size(), -1);
            minicc::for_each_stmt(f.decl->body, [&](const Stmt& s, int) {
                if (s.kind == StmtKind::Block) return;
                f.stmt[static_cast<std::size_t>(s.id)] = &s;
                if (s.expr && (s.expr->kind == ExprKind::Spawn ||
                               (s.expr->kind == ExprKind::Call && s.expr->builtin == Builtin::None)))
                    f.callee[static_cast<std::size_t>(s.id)] = by_name.at(s.expr->name);
            });
            f.first = f.cfg.nodes[static_cast<std::size_t>(f.cfg.entry)].next;
        }
    }
};

namespace {

enum class ThreadState { Ready, Waiting, Reacquire, Done };

struct Frame {
    int function = 0;
    int node = 0;
    std::vector<std::int64_t> locals;
};

struct Thread {
    std::vector<Frame> stack;
    ThreadState state = ThreadState::Ready;
    std::int64_t cond = -1;
    std::int64_t mutex = -1;  // mutex to take back after waking, -1 for none
    std::int64_t deadline = -1;
};

class Machine {
public:
    Machine(const Program::Impl& p, const ExecOptions& options) : p_(p), options_(options) {
        out_.covered.resize(p.functions.size());
        for (std::size_t i = 0; i < p.functions.size(); ++i)
            out_.covered[i].assign(p.functions[i].cfg.nodes.size(), 0);
        for (const auto& g : p.unit.globals) {
            if (g.type == Type::Mutex || g.type == Type::Cond) {
                globals_.push_back(new_object());
            } else if (g.init) {
                const Expr& e = *g.init;
                globals_.push_back(e.kind == ExprKind::Unary ? -e.args[0].value : e.value);
            } else {
                globals_.push_back(0);
            }
        }
    }

    RunOutcome run(const TestCase& test, Scheduler& scheduler) {
        auto it = p_.by_name.find(test.entry);
        if (it == p_.by_name.end()) throw InputError("test " + test.id + ": unknown entry function '" + test.entry + "'");
        const auto& decl = *p_.functions[static_cast<std::size_t>(it->second)].decl;
        if (decl.params.size() != test.args.size())
            throw InputError("test " + test.id + ": '" + test.entry + "' expects " +
                             std::to_string(decl.params.size()) + " argument(s)");
        for (std::size_t i = 0; i < decl.params.size(); ++i) {
            const Type t = decl.params[i].type;
            if (t != Type::Int && t != Type::Bool)
                throw InputError("test " + test.id + ": entry parameter '" + decl.params[i].name + "' of type " +
                                 std::string(type_name(t)) + " cannot be supplied");
            if (t == Type::Bool && test.args[i] != 0 && test.args[i] != 1)
                throw InputError("test " + test.id + ": argument " + std::to_string(i + 1) + " must be bool");
        }
        std::vector<int> observed;
        for (const auto& name : test.observe) {
            const int g = p_.unit.global_index(name);
            if (g < 0) throw InputError("test " + test.id + ": unknown observed global '" + name + "'");
            const Type t = p_.unit.globals[static_cast<std::size_t>(g)].type;
            if (t != Type::Int && t != Type::Bool)
                throw InputError("test " + test.id + ": observed global '" + name + "' must be int or bool");
            observed.push_back(g);
        }

        start_thread(it->second, test.args);
        std::vector<int> enabled;
        while (true) {
            if (out_.steps >= options_.step_limit) {
                out_.status = Status::StepLimit;
                break;
            }
            expire_timeouts();
            enabled.clear();
            for (std::size_t t = 0; t < threads_.size(); ++t)
                if (is_enabled(threads_[t])) enabled.push_back(static_cast<int>(t));
            if (enabled.empty()) {
                std::int64_t next_deadline = -1;
                bool live = false;
                for (const auto& t : threads_) {
                    if (t.state == ThreadState::Done) continue;
                    live = true;
                    if (t.state == ThreadState::Waiting && t.deadline >= 0 &&
                        (next_deadline < 0 || t.deadline < next_deadline))
                        next_deadline = t.deadline;
                }
                if (!live) break;
                if (next_deadline >= 0) {
                    clock_ = next_deadline;
                    continue;
                }
                out_.status = Status::Deadlock;
                break;
            }
            std::size_t pick = 0;
            if (enabled.size() > 1) {
                ++out_.branch_points;
                pick = scheduler.choose(enabled);
                if (pick >= enabled.size()) throw InternalError("scheduler chose out of range");
            }
            const int tid = enabled[pick];
            try {
                step(tid);
            } catch (const Fault& f) {
                out_.status = Status::RuntimeError;
                out_.message = f.message;
            }
            ++out_.steps;
            ++clock_;
            if (out_.status != Status::Ok) break;
        }
        for (int g : observed) out_.globals.emplace_back(p_.unit.globals[static_cast<std::size_t>(g)].name,
                                                         globals_[static_cast<std::size_t>(g)]);
        return std::move(out_);
    }

private:
    using Function = Program::Impl::Function;

    const Program::Impl& p_;
    const ExecOptions& options_;
    RunOutcome out_;
    std::vector<std::int64_t> globals_;
    std::vector<Thread> threads_;
    std::vector<int> owner_;                // by object id; -1 when free
    std::vector<std::deque<int>> waiters_;  // by object id
    std::int64_t clock_ = 0;

    std::int64_t new_object() {
        owner_.push_back(-1);
        waiters_.emplace_back();
        return static_cast<std::int64_t>(owner_.size() - 1);
    }

    const Function& fn(int f) const { return p_.functions[static_cast<std::size_t>(f)]; }

    const Stmt& current(const Thread& t) const {
        const Frame& fr = t.stack.back();
        return *fn(fr.function).stmt[static_cast<std::size_t>(fr.node)];
    }

    std::int64_t& slot(Frame& fr, minicc::VarScope scope, int index) {
        return scope == minicc::VarScope::Global ? globals_[static_cast<std::size_t>(index)]
                                                 : fr.locals[static_cast<std::size_t>(index)];
    }

    std::int64_t eval(const Expr& e, Frame& fr) {
        switch (e.kind) {
            case ExprKind::IntLit:
            case ExprKind::BoolLit: return e.value;
            case ExprKind::Var: return slot(fr, e.scope, e.slot);
            case ExprKind::Unary: {
                const std::int64_t v = eval(e.args[0], fr);
                return e.op == Op::Not ? !v : wrap(0 - static_cast<std::uint64_t>(v));
            }
            case ExprKind::Binary: {
                if (e.op == Op::And) return eval(e.args[0], fr) && eval(e.args[1], fr);
                if (e.op == Op::Or) return eval(e.args[0], fr) || eval(e.args[1], fr);
                const std::int64_t a = eval(e.args[0], fr);
                const std::int64_t b = eval(e.args[1], fr);
                const auto ua = static_cast<std::uint64_t>(a);
                const auto ub = static_cast<std::uint64_t>(b);
                switch (e.op) {
                    case Op::Add: return wrap(ua + ub);
                    case Op::Sub: return wrap(ua - ub);
                    case Op::Mul: return wrap(ua * ub);
                    case Op::Div:
                    case Op::Mod:
                        if (b == 0) throw Fault{"division by zero at line " + std::to_string(e.loc.line)};
                        if (a == std::numeric_limits<std::int64_t>::min() && b == -1)
                            return e.op == Op::Div ? a : 0;
                        return e.op == Op::Div ? a / b : a % b;
                    case Op::Shl:
                    case Op::Shr: return shift(e.op, a, b);
                    case Op::Lt: return a < b;
                    case Op::Le: return a <= b;
                    case Op::Gt: return a > b;
                    case Op::Ge: return a >= b;
                    case Op::Eq: return a == b;
                    case Op::Ne: return a != b;
                    default: break;
                }
                break;
            }
            case ExprKind::Call:
            case ExprKind::Spawn: break;
        }
        throw InternalError("unexpected expression in evaluation");
    }

    void cover(int function, int node) {
        out_.covered[static_cast<std::size_t>(function)][static_cast<std::size_t>(node)] = 1;
    }

    /// Moves the thread's program counter to `node`, returning from the
    /// function when it is the exit.
    void arrive(int tid, int node) {
        Frame& fr = threads_[static_cast<std::size_t>(tid)].stack.back();
        fr.node = node;
        if (node == fn(fr.function).cfg.exit) {
            do_return(tid, 0);
            return;
        }
        cover(fr.function, node);
    }

    void advance(int tid) {
        const Frame& fr = threads_[static_cast<std::size_t>(tid)].stack.back();
        arrive(tid, fn(fr.function).cfg.nodes[static_cast<std::size_t>(fr.node)].next);
    }

    void do_return(int tid, std::int64_t value) {
        Thread& t = threads_[static_cast<std::size_t>(tid)];
        t.stack.pop_back();
        if (t.stack.empty()) {
            t.state = ThreadState::Done;
            return;
        }
        Frame& caller = t.stack.back();
        const Stmt& s = *fn(caller.function).stmt[static_cast<std::size_t>(caller.node)];
        if (s.kind == StmtKind::Decl || s.kind == StmtKind::Assign) slot(caller, s.target_scope, s.target_slot) = value;
        advance(tid);
    }

    Frame make_frame(int function, const std::vector<std::int64_t>& args) {
        const auto& decl = *fn(function).decl;
        Frame fr;
        fr.function = function;
        fr.locals.assign(decl.local_names.size(), 0);
        std::copy(args.begin(), args.end(), fr.locals.begin());
        return fr;
    }

    std::vector<std::int64_t> eval_args(const Expr& call, Frame& fr) {
        std::vector<std::int64_t> args;
        args.reserve(call.args.size());
        for (const auto& a : call.args) args.push_back(eval(a, fr));
        return args;
    }

    int start_thread(int function, const std::vector<std::int64_t>& args) {
        const int tid = static_cast<int>(threads_.size());
        threads_.emplace_back();
        threads_.back().stack.push_back(make_frame(function, args));
        arrive(tid, fn(function).first);
        return tid;
    }

    void push_call(int tid, int callee, std::vector<std::int64_t> args) {
        threads_[static_cast<std::size_t>(tid)].stack.push_back(make_frame(callee, args));
        arrive(tid, fn(callee).first);
    }

    bool is_enabled(const Thread& t) const {
        switch (t.state) {
            case ThreadState::Done:
            case ThreadState::Waiting: return false;
            case ThreadState::Reacquire: return t.mutex < 0 || owner_[static_cast<std::size_t>(t.mutex)] < 0;
            case ThreadState::Ready: break;
        }
        const Stmt& s = current(t);
        if (s.kind != StmtKind::Call) return true;
        const Frame& fr = t.stack.back();
        auto value_of = [&](const Expr& e) {
            return e.scope == minicc::VarScope::Global ? globals_[static_cast<std::size_t>(e.slot)]
                                                       : fr.locals[static_cast<std::size_t>(e.slot)];
        };
        switch (s.expr->builtin) {
            case Builtin::Lock: return owner_[static_cast<std::size_t>(value_of(s.expr->args[0]))] < 0;
            case Builtin::Join: {
                const std::int64_t h = value_of(s.expr->args[0]);
                return h <= 0 || static_cast<std::size_t>(h) >= threads_.size() ||
                       threads_[static_cast<std::size_t>(h)].state == ThreadState::Done;
            }
            default: return true;
        }
    }

    void wake(int tid) {
        Thread& t = threads_[static_cast<std::size_t>(tid)];
        t.state = ThreadState::Reacquire;
        t.deadline = -1;
        t.cond = -1;
    }

    void expire_timeouts() {
        for (std::size_t i = 0; i < threads_.size(); ++i) {
            Thread& t = threads_[i];
            if (t.state != ThreadState::Waiting || t.deadline < 0 || t.deadline > clock_) continue;
            auto& q = waiters_[static_cast<std::size_t>(t.cond)];
            q.erase(std::find(q.begin(), q.end(), static_cast<int>(i)));
            wake(static_cast<int>(i));
        }
    }

    void step(int tid) {
        Thread& t = threads_[static_cast<std::size_t>(tid)];
        {
            const Frame& fr = t.stack.back();
            if (options_.record_trace) out_.trace.push_back({out_.steps, tid, fr.function, fr.node});
        }
        if (t.state == ThreadState::Reacquire) {
            if (t.mutex >= 0) owner_[static_cast<std::size_t>(t.mutex)] = tid;
            t.mutex = -1;
            t.state = ThreadState::Ready;
            advance(tid);
            return;
        }
        Frame& fr = t.stack.back();
        const Function& f = fn(fr.function);
        const Stmt& s = *f.stmt[static_cast<std::size_t>(fr.node)];
        const auto& node = f.cfg.nodes[static_cast<std::size_t>(fr.node)];
        switch (s.kind) {
            case StmtKind::Decl:
            case StmtKind::Assign: {
                if (s.kind == StmtKind::Decl && !s.expr) {
                    std::int64_t v = 0;
                    if (s.decl_type == Type::Mutex || s.decl_type == Type::Cond) v = new_object();
                    slot(fr, s.target_scope, s.target_slot) = v;
                    break;
                }
                const Expr& e = *s.expr;
                if (e.kind == ExprKind::Call) {
                    push_call(tid, f.callee[static_cast<std::size_t>(fr.node)], eval_args(e, fr));
                    return;
                }
                std::int64_t v = 0;
                if (e.kind == ExprKind::Spawn) {
                    auto args = eval_args(e, fr);
                    v = start_thread(f.callee[static_cast<std::size_t>(fr.node)], args);
                } else {
                    v = eval(e, fr);
                }
                // start_thread may have reallocated threads_; refetch the frame.
                Frame& cur = threads_[static_cast<std::size_t>(tid)].stack.back();
                std::int64_t& target = slot(cur, s.target_scope, s.target_slot);
                switch (s.assign_op) {
                    case minicc::AssignOp::Set: target = v; break;
                    case minicc::AssignOp::OrSet: target |= v; break;
                    case minicc::AssignOp::AndSet: target &= v; break;
                }
                break;
            }
            case StmtKind::If:
            case StmtKind::While:
            case StmtKind::DoWhile:
                arrive(tid, eval(*s.expr, fr) ? node.next : node.alt);
                return;
            case StmtKind::Return:
                do_return(tid, s.expr ? eval(*s.expr, fr) : 0);
                return;
            case StmtKind::Call:
                if (!call(tid, s, fr)) return;
                break;
            case StmtKind::Block: throw InternalError("block reached the interpreter");
        }
        advance(tid);
    }

    /// Executes a call statement. Returns false when control already moved.
    bool call(int tid, const Stmt& s, Frame& fr) {
        const Expr& e = *s.expr;
        Thread& t = threads_[static_cast<std::size_t>(tid)];
        auto arg = [&](std::size_t i) { return eval(e.args[i], fr); };
        switch (e.builtin) {
            case Builtin::None:
                push_call(tid, fn(fr.function).callee[static_cast<std::size_t>(fr.node)], eval_args(e, fr));
                return false;
            case Builtin::Lock: owner_[static_cast<std::size_t>(arg(0))] = tid; return true;
            case Builtin::Unlock: {
                int& o = owner_[static_cast<std::size_t>(arg(0))];
                if (o == tid) o = -1;
                return true;
            }
            case Builtin::Wait:
            case Builtin::TimedWait: {
                const std::int64_t c = arg(0);
                const std::int64_t m = arg(1);
                int& o = owner_[static_cast<std::size_t>(m)];
                t.mutex = -1;
                if (o == tid) {
                    o = -1;
                    t.mutex = m;
                }
                t.cond = c;
                t.deadline = e.builtin == Builtin::TimedWait ? clock_ + std::max<std::int64_t>(arg(2), 0) : -1;
                t.state = ThreadState::Waiting;
                waiters_[static_cast<std::size_t>(c)].push_back(tid);
                return false;
            }
            case Builtin::Signal:
            case Builtin::Broadcast: {
                auto& q = waiters_[static_cast<std::size_t>(arg(0))];
                while (!q.empty()) {
                    const int w = q.front();
                    q.pop_front();
                    wake(w);
                    if (e.builtin == Builtin::Signal) break;
                }
                return true;
            }
            case Builtin::Join:
            case Builtin::Yield: return true;
            case Builtin::Print: {
                std::string line;
                for (std::size_t i = 0; i < e.args.size(); ++i) {
                    if (i) line += ' ';
                    line += format_value(eval(e.args[i], fr), e.args[i].type);
                }
                out_.prints.push_back(std::move(line));
                return true;
            }
            case Builtin::Assert:
                if (!arg(0)) {
                    out_.status = Status::AssertionFailure;
                    out_.message = "assertion failed at line " + std::to_string(s.loc.line);
                    return false;
                }
                return true;
        }
        return true;
    }
};

/// Replays a fixed prefix of choices, then always takes the first thread,
/// recording how many options each decision had.
class ReplayScheduler final : public Scheduler {
public:
    ReplayScheduler(std::vector<std::size_t>& choices, std::vector<std::size_t>& arity, int max_events)
        : choices_(choices), arity_(arity), max_events_(static_cast<std::size_t>(max_events)) {}

    std::size_t choose(const std::vector<int>& enabled) override {
        if (pos_ >= max_events_) {
            truncated_ = true;
            ++pos_;
            return 0;
        }
        if (pos_ < choices_.size()) {
            if (arity_[pos_] != enabled.size()) throw InternalError("schedule replay diverged");
            return choices_[pos_++];
        }
        choices_.push_back(0);
        arity_.push_back(enabled.size());
        ++pos_;
        return 0;
    }

    bool truncated() const { return truncated_; }

private:
    std::vector<std::size_t>& choices_;
    std::vector<std::size_t>& arity_;
    std::size_t max_events_;
    std::size_t pos_ = 0;
    bool truncated_ = false;
};

}  // namespace

Program::Program(const minicc::SourceUnit& unit) : impl_(std::make_unique<Impl>(unit)) {}
Program::~Program() = default;
Program::Program(Program&&) noexcept = default;
Program& Program::operator=(Program&&) noexcept = default;

const minicc::SourceUnit& Program::unit() const { return impl_->unit; }

int Program::function_index(std::string_view name) const {
    auto it = impl_->by_name.find(name);
    return it == impl_->by_name.end() ? -1 : it->second;
}

RunOutcome Program::run(const TestCase& test, Scheduler& scheduler, const ExecOptions& options) const {
    Machine m(*impl_, options);
    return m.run(test, scheduler);
}

RunOutcome Program::run(const TestCase& test, std::uint64_t seed, const ExecOptions& options) const {
    SeededScheduler s(seed);
    return run(test, s, options);
}

std::set<std::string> reference_set(const Program& p, const TestCase& test, int runs, const ExecOptions& options,
                                    std::uint64_t base_seed) {
    std::set<std::string> out;
    for (int i = 0; i < runs; ++i)
        out.insert(p.run(test, base_seed + 1 + static_cast<std::uint64_t>(i), options).observable());
    return out;
}

Exploration explore_exhaustive(const Program& p, const TestCase& test, int max_events, const ExecOptions& options,
                               std::size_t max_schedules) {
    if (max_events < 0) throw InputError("event bound must be non-negative");
    Exploration ex;
    std::vector<std::size_t> choices;
    std::vector<std::size_t> arity;
    while (true) {
        ReplayScheduler sched(choices, arity, max_events);
        RunOutcome r = p.run(test, sched, options);
        ++ex.schedules;
        ex.max_branch_points = std::max(ex.max_branch_points, r.branch_points);
        if (sched.truncated()) ex.complete = false;
        if (r.status == Status::Deadlock) ex.deadlock = true;
        ex.observables.insert(r.observable());
        while (!choices.empty() && choices.back() + 1 >= arity.back()) {
            choices.pop_back();
            arity.pop_back();
        }
        if (choices.empty()) break;
        ++choices.back();
        if (ex.schedules >= max_schedules) {
            ex.complete = false;
            break;
        }
    }
    return ex;
}

OriginalRuns run_original(const Program& p, const TestCase& test, int runs, const ExecOptions& options,
                          std::uint64_t base_seed) {
    if (runs < 1) throw InputError("run count must be positive");
    OriginalRuns o;
    o.base_seed = base_seed;
    o.runs.reserve(static_cast<std::size_t>(runs));
    for (int i = 0; i < runs; ++i) {
        o.runs.push_back(p.run(test, base_seed + 1 + static_cast<std::uint64_t>(i), options));
        o.reference.insert(o.runs.back().observable());
    }
    return o;
}

Judgement judge_mutant(const Program& original, const OriginalRuns& reference, const mutation::Mutant& mutant,
                       const Program& mutant_program, const TestCase& test, const ExecOptions& options) {
    Judgement j;
    const int f = original.function_index(mutant.function);
    if (f < 0) throw InputError("mutant " + mutant.id + " names unknown function '" + mutant.function + "'");
    for (std::size_t i = 0; i < reference.runs.size(); ++i) {
        if (!reference.runs[i].reached(f, mutant.touched)) continue;
        j.executed = true;
        const auto r = mutant_program.run(test, reference.base_seed + 1 + i, options);
        if (!reference.reference.count(r.observable())) {
            j.killed = true;
            break;
        }
    }
    return j;
}

bool KillMatrix::executed(std::size_t m) const {
    return std::any_of(cells[m].begin(), cells[m].end(), [](const Judgement& j) { return j.executed; });
}

bool KillMatrix::killed(std::size_t m) const {
    return std::any_of(cells[m].begin(), cells[m].end(), [](const Judgement& j) { return j.killed; });
}

double KillMatrix::mutation_score() const {
    if (mutants.empty()) return 0.0;
    std::size_t k = 0;
    for (std::size_t m = 0; m < mutants.size(); ++m) k += killed(m);
    return static_cast<double>(k) / static_cast<double>(mutants.size());
}

KillMatrix build_kill_matrix(const minicc::SourceUnit& original, const std::vector<mutation::Mutant>& mutants,
                             const std::vector<TestCase>& tests, int runs, const ExecOptions& options,
                             std::uint64_t base_seed) {
    KillMatrix km;
    for (const auto& t : tests) km.tests.push_back(t.id);
    Program orig(original);
    std::vector<OriginalRuns> refs;
    refs.reserve(tests.size());
    for (const auto& t : tests) refs.push_back(run_original(orig, t, runs, options, base_seed));
    for (const auto& m : mutants) {
        km.mutants.push_back(m.id);
        Program mp(m.unit);
        std::vector<Judgement> row;
        for (std::size_t t = 0; t < tests.size(); ++t)
            row.push_back(judge_mutant(orig, refs[t], m, mp, tests[t], options));
        km.cells.push_back(std::move(row));
    }
    return km;
}

DynMetricRecord dynamic_metrics(const KillMatrix& matrix, const std::vector<mutation::Mutant>& mutants,
                                std::string_view function) {
    std::map<std::string, std::size_t, std::less<>> row;
    for (std::size_t i = 0; i < matrix.mutants.size(); ++i) row.emplace(matrix.mutants[i], i);
    std::array<int, 12> total{}, executed{}, killed{};
    for (const auto& m : mutants) {
        if (m.function != function) continue;
        const auto op = static_cast<std::size_t>(m.op);
        ++total[op];
        auto it = row.find(m.id);
        if (it == row.end()) throw InputError("mutant " + m.id + " missing from kill matrix");
        executed[op] += matrix.executed(it->second);
        killed[op] += matrix.killed(it->second);
    }
    DynMetricRecord r;
    for (std::size_t i = 0; i < 12; ++i) {
        if (!total[i]) continue;
        r.executed[i] = 100.0 * executed[i] / total[i];
        r.killed[i] = 100.0 * killed[i] / total[i];
    }
    return r;
}

}  // namespace conpredict::exec
