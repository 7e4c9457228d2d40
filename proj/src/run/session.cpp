#include "idp/run/session.hpp"

#include <charconv>
#include <limits>
#include <sstream>
#include <variant>

#include "idp/engine/inference.hpp"
#include "idp/lang/parser.hpp"
#include "idp/lang/printer.hpp"
#include "idp/util/random.hpp"

namespace idp::run {

using Clock = std::chrono::steady_clock;

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::out: return "stdout";
    case EventKind::err: return "stderr";
    case EventKind::ask: return "ask";
    case EventKind::viz: return "viz";
    case EventKind::limit: return "limit";
    case EventKind::exit: return "exit";
  }
  return "stderr";
}

struct Run::State {
  RunRequest request;
  EventSink sink;
  engine::StopSource stop;

  std::mutex mutex;
  std::condition_variable cv;
  std::deque<std::string> inputs;
  std::deque<std::pair<int, int>> clicks;
  std::optional<std::pair<int, int>> grid;
  bool finished = false;

  // Compute time: the clock only runs while the worker is not waiting for
  // input or clicks.
  bool waiting = false;
  Clock::time_point resumed = Clock::now();
  Clock::duration consumed{};

  // Event delivery; recursive so that a sink may call back into the run.
  std::recursive_mutex emit_mutex;
  std::vector<VizCommand> pending_viz;
  std::size_t output_bytes = 0;
  bool exited = false;

  void deliver(const Event& e) {
    std::lock_guard lock(emit_mutex);
    if (exited) return;
    if (e.kind != EventKind::viz && !pending_viz.empty()) {
      Event viz{EventKind::viz, {}, std::move(pending_viz), 0};
      pending_viz.clear();
      sink(viz);
    }
    if (e.kind == EventKind::exit) exited = true;
    sink(e);
  }

  void flush_viz() {
    std::lock_guard lock(emit_mutex);
    if (exited || pending_viz.empty()) return;
    Event viz{EventKind::viz, {}, std::move(pending_viz), 0};
    pending_viz.clear();
    sink(viz);
  }

  void queue_viz(VizCommand c) {
    std::lock_guard lock(emit_mutex);
    pending_viz.push_back(std::move(c));
  }

  /// stdout/stderr from the worker, counted against the output cap.
  void output(EventKind kind, std::string text) {
    const auto cap = request.limits.output_bytes_max;
    std::size_t allowed = 0;
    {
      std::lock_guard lock(emit_mutex);
      allowed = output_bytes >= cap ? 0 : cap - output_bytes;
      output_bytes += text.size();
    }
    if (text.size() <= allowed) {
      deliver({kind, std::move(text), {}, 0});
      return;
    }
    if (allowed > 0) deliver({kind, text.substr(0, allowed), {}, 0});
    throw engine::LimitError(engine::LimitKind::output);
  }

  void pause() {
    std::lock_guard lock(mutex);
    consumed += Clock::now() - resumed;
    waiting = true;
    cv.notify_all();
  }

  void resume() {
    std::lock_guard lock(mutex);
    resumed = Clock::now();
    waiting = false;
    cv.notify_all();
  }

  template <typename Ready>
  void wait_until(std::unique_lock<std::mutex>& lock, Ready ready) {
    cv.wait(lock, [&] { return ready() || stop.reason() != engine::StopReason::none; });
    stop.token().poll();
  }

  std::string next_input() {
    flush_viz();
    pause();
    std::string line;
    {
      std::unique_lock lock(mutex);
      wait_until(lock, [&] { return !inputs.empty(); });
      line = std::move(inputs.front());
      inputs.pop_front();
    }
    resume();
    return line;
  }

  std::pair<int, int> next_click() {
    flush_viz();
    pause();
    std::pair<int, int> click;
    {
      std::unique_lock lock(mutex);
      wait_until(lock, [&] { return !clicks.empty(); });
      click = clicks.front();
      clicks.pop_front();
    }
    resume();
    return click;
  }

  void watch(std::chrono::milliseconds wall) {
    std::unique_lock lock(mutex);
    while (!finished && stop.reason() == engine::StopReason::none) {
      if (waiting) {
        cv.wait(lock);
        continue;
      }
      const auto used = consumed + (Clock::now() - resumed);
      if (used >= wall) {
        stop.request_stop(engine::StopReason::wall);
        cv.notify_all();
        return;
      }
      cv.wait_for(lock, wall - used);
    }
  }
};

namespace {

using Value = std::variant<std::int64_t, bool, std::string>;

struct RuntimeError : std::runtime_error {
  RuntimeError(lang::SourceRange r, const std::string& message) : std::runtime_error(message), range(r) {}
  lang::SourceRange range;
};

struct ExitRequest {
  int code;
};

std::string text_of(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<std::string>(v);
}

std::string location(const std::string& file, lang::SourceRange r) {
  return file + ":" + std::to_string(r.line) + ":" + std::to_string(r.col);
}

class Interpreter {
 public:
  explicit Interpreter(Run::State& s) : s_(s) {
    budget_.limits.ground_atoms_max = s.request.limits.ground_atoms_max;
    budget_.limits.max_decisions = s.request.limits.max_decisions;
    budget_.stop = s.stop.token();
  }

  int run() {
    auto analysis = lang::analyze(s_.request.files);
    if (lang::has_errors(analysis.diagnostics)) {
      std::string text;
      for (const auto& d : analysis.diagnostics) {
        if (d.severity == lang::Severity::error) text += location(d.file, d.range) + ": error: " + d.message + "\n";
      }
      s_.output(EventKind::err, text);
      return 1;
    }
    program_ = std::move(*analysis.program);
    return s_.request.mode == Mode::main ? run_main() : run_shell();
  }

 private:
  int run_main() {
    const auto* proc = program_.procedure(s_.request.entry);
    if (!proc) {
      s_.output(EventKind::err, "unknown procedure " + s_.request.entry + "\n");
      return 1;
    }
    file_ = proc->file;
    try {
      exec(proc->body);
    } catch (const ExitRequest& e) {
      return e.code;
    } catch (const RuntimeError& e) {
      s_.output(EventKind::err, location(file_, e.range) + ": runtime error: " + e.what() + "\n");
      return 1;
    }
    return 0;
  }

  int run_shell() {
    file_ = "<shell>";
    shell_ = true;
    while (true) {
      s_.deliver({EventKind::ask, "> ", {}, 0});
      const auto line = s_.next_input();
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      auto parsed = lang::parse_commands(line, file_);
      if (!parsed.ok()) {
        std::string message;
        for (const auto& d : parsed.diagnostics) {
          if (d.severity == lang::Severity::error) {
            message = d.message;
            break;
          }
        }
        s_.output(EventKind::err, "parse error in command: " + message + "\n");
        continue;
      }
      const auto checked = lang::check_commands(parsed.commands, program_, file_);
      if (lang::has_errors(checked)) {
        std::string text;
        for (const auto& d : checked) {
          if (d.severity == lang::Severity::error) text += d.message + "\n";
        }
        s_.output(EventKind::err, text);
        continue;
      }
      try {
        exec(parsed.commands);
      } catch (const ExitRequest& e) {
        return e.code;
      } catch (const RuntimeError& e) {
        s_.output(EventKind::err, std::string("runtime error: ") + e.what() + "\n");
      }
    }
  }

  void exec(const std::vector<lang::Command>& commands) {
    for (const auto& c : commands) exec(c);
  }

  void exec(const lang::Command& c) {
    budget_.stop.poll();
    switch (c.kind) {
      case lang::CommandKind::assign: env_[c.target.text] = eval(c.expr); return;
      case lang::CommandKind::expression: {
        const auto value = eval(c.expr);
        if (shell_ && echoes(c.expr)) s_.output(EventKind::out, text_of(value) + "\n");
        return;
      }
      case lang::CommandKind::if_else:
        exec(truthy(eval(c.expr), c.expr.range) ? c.body : c.else_body);
        return;
      case lang::CommandKind::while_loop:
        while (truthy(eval(c.expr), c.expr.range)) {
          exec(c.body);
          budget_.stop.poll();
        }
        return;
    }
  }

  // Shell lines show their value unless the command produces its own output.
  static bool echoes(const lang::Expr& e) {
    if (e.kind != lang::ExprKind::call) return true;
    static const char* silent[] = {"print", "modelexpand", "propagate", "unsatcore",
                                   "draw_grid", "draw_cell", "draw_label", "onclick"};
    for (const auto* s : silent) {
      if (e.text == s) return false;
    }
    return true;
  }

  static bool truthy(const Value& v, lang::SourceRange r) {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i != 0;
    throw RuntimeError(r, "expected a boolean or an integer");
  }

  static std::int64_t integer(const Value& v, lang::SourceRange r) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    throw RuntimeError(r, "expected an integer but got " + text_of(v));
  }

  Value eval(const lang::Expr& e) {
    using K = lang::ExprKind;
    switch (e.kind) {
      case K::integer: return e.integer;
      case K::boolean: return e.boolean;
      case K::string: return e.text;
      case K::variable: {
        const auto it = env_.find(e.text);
        if (it == env_.end()) throw RuntimeError(e.range, "undefined variable " + e.text);
        return it->second;
      }
      case K::unary: {
        const auto v = eval(e.operands[0]);
        if (e.text == "~") return !truthy(v, e.operands[0].range);
        const auto i = integer(v, e.operands[0].range);
        if (i == std::numeric_limits<std::int64_t>::min()) throw RuntimeError(e.range, "integer overflow");
        return -i;
      }
      case K::binary: return binary(e);
      case K::call: return call(e);
    }
    throw RuntimeError(e.range, "unsupported expression");
  }

  Value binary(const lang::Expr& e) {
    const auto& op = e.text;
    const auto& lhs_expr = e.operands[0];
    const auto& rhs_expr = e.operands[1];
    if (op == "&" || op == "|") {
      const bool lhs = truthy(eval(lhs_expr), lhs_expr.range);
      if (op == "&" && !lhs) return false;
      if (op == "|" && lhs) return true;
      return truthy(eval(rhs_expr), rhs_expr.range);
    }
    const auto lhs = eval(lhs_expr);
    const auto rhs = eval(rhs_expr);
    if (op == "=") return lhs == rhs;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") {
      if (lhs.index() != rhs.index() || std::holds_alternative<bool>(lhs)) {
        throw RuntimeError(e.range, "cannot compare " + text_of(lhs) + " and " + text_of(rhs));
      }
      const auto cmp = lhs <=> rhs;
      if (op == "<") return cmp < 0;
      if (op == ">") return cmp > 0;
      if (op == "<=") return cmp <= 0;
      return cmp >= 0;
    }
    if (op == "+" && (std::holds_alternative<std::string>(lhs) || std::holds_alternative<std::string>(rhs))) {
      return text_of(lhs) + text_of(rhs);
    }
    const auto a = integer(lhs, lhs_expr.range);
    const auto b = integer(rhs, rhs_expr.range);
    std::int64_t r = 0;
    bool overflow = false;
    if (op == "+") {
      overflow = __builtin_add_overflow(a, b, &r);
    } else if (op == "-") {
      overflow = __builtin_sub_overflow(a, b, &r);
    } else if (op == "*") {
      overflow = __builtin_mul_overflow(a, b, &r);
    } else if (op == "/" || op == "%") {
      if (b == 0) throw RuntimeError(e.range, "division by zero");
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
        overflow = true;
      } else {
        r = op == "/" ? a / b : a % b;
      }
    } else {
      throw RuntimeError(e.range, "unknown operator " + op);
    }
    if (overflow) throw RuntimeError(e.range, "integer overflow");
    return r;
  }

  Value call(const lang::Expr& e) {
    const auto& name = e.text;
    const auto& args = e.operands;
    if (name == "print") {
      std::string line;
      for (std::size_t i = 0; i < args.size(); ++i) line += (i ? " " : "") + text_of(eval(args[i]));
      s_.output(EventKind::out, line + "\n");
      return true;
    }
    if (name == "ask") {
      const std::string prompt = args.empty() ? "" : text_of(eval(args[0]));
      s_.deliver({EventKind::ask, prompt, {}, 0});
      return s_.next_input();
    }
    if (name == "int") return to_int(eval(args[0]), e.range);
    if (name == "exit") throw ExitRequest{args.empty() ? 0 : static_cast<int>(integer(eval(args[0]), args[0].range))};
    if (name == "modelexpand" || name == "propagate" || name == "unsatcore") return inference(e);
    if (name == "draw_grid") {
      const auto w = integer(eval(args[0]), args[0].range);
      const auto h = integer(eval(args[1]), args[1].range);
      if (w < 1 || h < 1 || w > 1000 || h > 1000) throw RuntimeError(e.range, "grid size must be between 1 and 1000");
      {
        std::lock_guard lock(s_.mutex);
        s_.grid = std::pair{static_cast<int>(w), static_cast<int>(h)};
      }
      s_.queue_viz({VizCommand::Kind::grid, static_cast<int>(w), static_cast<int>(h), {}});
      return true;
    }
    if (name == "draw_cell" || name == "draw_label") {
      const auto x = integer(eval(args[0]), args[0].range);
      const auto y = integer(eval(args[1]), args[1].range);
      const auto text = text_of(eval(args[2]));
      check_in_grid(x, y, e.range);
      const auto kind = name == "draw_cell" ? VizCommand::Kind::cell : VizCommand::Kind::label;
      s_.queue_viz({kind, static_cast<int>(x), static_cast<int>(y), text});
      return true;
    }
    if (name == "onclick") {
      {
        std::lock_guard lock(s_.mutex);
        if (!s_.grid) throw RuntimeError(e.range, "onclick needs a grid; call draw_grid first");
      }
      const auto [x, y] = s_.next_click();
      env_[args[0].text] = std::int64_t{x};
      env_[args[1].text] = std::int64_t{y};
      return true;
    }
    throw RuntimeError(e.range, "unknown command " + name);
  }

  void check_in_grid(std::int64_t x, std::int64_t y, lang::SourceRange r) {
    std::lock_guard lock(s_.mutex);
    if (!s_.grid) throw RuntimeError(r, "draw_grid must come first");
    if (x < 0 || y < 0 || x >= s_.grid->first || y >= s_.grid->second) {
      throw RuntimeError(r, "cell (" + std::to_string(x) + ", " + std::to_string(y) + ") is outside the grid");
    }
  }

  static Value to_int(const Value& v, lang::SourceRange r) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* b = std::get_if<bool>(&v)) return std::int64_t{*b ? 1 : 0};
    const auto& s = std::get<std::string>(v);
    const auto begin = s.find_first_not_of(" \t\r\n");
    const auto end = s.find_last_not_of(" \t\r\n");
    std::int64_t out = 0;
    if (begin != std::string::npos) {
      const auto* first = s.data() + begin;
      const auto* last = s.data() + end + 1;
      const auto [ptr, ec] = std::from_chars(first, last, out);
      if (ec == std::errc() && ptr == last) return out;
    }
    throw RuntimeError(r, "cannot convert \"" + s + "\" to an integer");
  }

  Value inference(const lang::Expr& e) {
    const auto& theory = *program_.theory(e.operands[0].text);
    const auto structure = engine::structure_from(program_, *program_.structure(e.operands[1].text));
    if (e.text == "modelexpand") {
      std::size_t wanted = 1;
      if (e.operands.size() == 3) {
        const auto n = integer(eval(e.operands[2]), e.operands[2].range);
        if (n < 1) throw RuntimeError(e.operands[2].range, "the number of models must be at least 1");
        wanted = static_cast<std::size_t>(n);
      }
      wanted = std::min(wanted, s_.request.limits.max_models);
      const auto models = engine::modelexpand(theory, structure, wanted, budget_);
      if (models.empty()) {
        s_.output(EventKind::out, "Unsatisfiable: no models.\n");
      } else {
        for (std::size_t i = 0; i < models.size(); ++i) {
          s_.output(EventKind::out, "Model " + std::to_string(i + 1) + ":\n" + engine::render(models[i]));
        }
      }
      return static_cast<std::int64_t>(models.size());
    }
    if (e.text == "propagate") {
      const auto refined = engine::propagate(theory, structure, budget_);
      s_.output(EventKind::out, refined ? engine::render(*refined) : "Inconsistent: no models.\n");
      return refined.has_value();
    }
    const auto core = engine::unsatcore(theory, structure, budget_);
    if (!core) {
      s_.output(EventKind::out, "Satisfiable: no unsat core.\n");
      return false;
    }
    std::string text = "Unsat core of " + core->theory + " (" + std::to_string(core->items.size()) +
                       (core->items.size() == 1 ? " instantiation):\n" : " instantiations):\n");
    for (const auto& item : core->items) {
      const auto& sentence = theory.sentences[static_cast<std::size_t>(item.sentence - 1)];
      text += "  " + location(core->file, item.range) + ": " + lang::print(sentence.formula) + ".";
      if (!item.substitution_text.empty()) text += "  [" + item.substitution_text + "]";
      text += "\n";
    }
    s_.output(EventKind::out, text);
    return true;
  }

  Run::State& s_;
  engine::Budget budget_;
  lang::TypedProgram program_;
  std::map<std::string, Value> env_;
  std::string file_;
  bool shell_ = false;
};

void execute(Run::State& s) {
  int code = 0;
  try {
    code = Interpreter(s).run();
  } catch (const engine::LimitError& e) {
    s.deliver({EventKind::limit, engine::to_string(e.kind()), {}, 0});
    code = 2;
  } catch (const std::exception& e) {
    s.deliver({EventKind::err, std::string("internal error: ") + e.what() + "\n", {}, 0});
    code = 1;
  }
  s.deliver({EventKind::exit, {}, {}, code});
  std::lock_guard lock(s.mutex);
  s.finished = true;
  s.cv.notify_all();
}

}  // namespace

Run::Run(RunRequest request, EventSink sink) : state_(std::make_shared<State>()) {
  state_->request = std::move(request);
  state_->sink = std::move(sink);
  state_->resumed = Clock::now();
  if (state_->request.limits.wall_ms > 0) {
    watchdog_ = std::thread([s = state_] { s->watch(std::chrono::milliseconds(s->request.limits.wall_ms)); });
  }
  worker_ = std::thread([s = state_] { execute(*s); });
}

Run::~Run() {
  kill();
  for (auto* t : {&worker_, &watchdog_}) {
    if (!t->joinable()) continue;
    // A sink that drops the last reference from the worker itself.
    if (t->get_id() == std::this_thread::get_id()) {
      t->detach();
    } else {
      t->join();
    }
  }
}

void Run::send_input(std::string line) {
  std::lock_guard lock(state_->mutex);
  state_->inputs.push_back(std::move(line));
  state_->cv.notify_all();
}

void Run::send_click(int x, int y) {
  std::string warning;
  {
    std::lock_guard lock(state_->mutex);
    if (state_->finished) return;
    if (!state_->grid) {
      warning = "click ignored: no grid has been drawn\n";
    } else if (x < 0 || y < 0 || x >= state_->grid->first || y >= state_->grid->second) {
      warning = "click ignored: (" + std::to_string(x) + ", " + std::to_string(y) + ") is outside the grid\n";
    } else {
      state_->clicks.emplace_back(x, y);
      state_->cv.notify_all();
      return;
    }
  }
  state_->deliver({EventKind::err, warning, {}, 0});
}

void Run::kill() {
  state_->stop.request_stop(engine::StopReason::killed);
  std::lock_guard lock(state_->mutex);
  state_->cv.notify_all();
}

bool Run::finished() const {
  std::lock_guard lock(state_->mutex);
  return state_->finished;
}

void Run::wait() {
  std::unique_lock lock(state_->mutex);
  state_->cv.wait(lock, [&] { return state_->finished; });
}

bool Run::wait_for(std::chrono::milliseconds timeout) {
  std::unique_lock lock(state_->mutex);
  return state_->cv.wait_for(lock, timeout, [&] { return state_->finished; });
}

std::string SessionRegistry::start(RunRequest request, EventSink sink) {
  std::lock_guard lock(mutex_);
  if (closed_) throw std::runtime_error("the session registry is shut down");
  std::string id;
  do {
    id = util::random_token(32, util::kHex);
  } while (runs_.count(id));
  runs_.emplace(id, std::make_shared<Run>(std::move(request), std::move(sink)));
  return id;
}

std::shared_ptr<Run> SessionRegistry::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = runs_.find(id);
  return it == runs_.end() ? nullptr : it->second;
}

void SessionRegistry::remove(const std::string& id) {
  std::shared_ptr<Run> run;
  {
    std::lock_guard lock(mutex_);
    const auto it = runs_.find(id);
    if (it == runs_.end()) return;
    run = std::move(it->second);
    runs_.erase(it);
  }
  run->kill();
}

void SessionRegistry::shutdown() {
  std::map<std::string, std::shared_ptr<Run>> runs;
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
    runs.swap(runs_);
  }
  for (auto& [id, run] : runs) run->kill();
  for (auto& [id, run] : runs) run->wait();
}

std::size_t SessionRegistry::size() const {
  std::lock_guard lock(mutex_);
  return runs_.size();
}

std::size_t SessionRegistry::active() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& [id, run] : runs_) n += !run->finished();
  return n;
}

}  // namespace idp::run
