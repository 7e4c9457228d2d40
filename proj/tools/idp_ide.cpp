#include <CLI11.hpp>

#include <atomic>
#include <condition_variable>
#include <csignal>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <spdlog/spdlog.h>

#include "idp/lang/resolver.hpp"
#include "idp/run/session.hpp"
#include "idp/server/config.hpp"
#include "idp/server/server.hpp"

namespace {

using namespace idp;

std::vector<lang::SourceFile> read_files(const std::vector<std::string>& paths) {
  std::vector<lang::SourceFile> files;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p);
    std::ostringstream text;
    text << in.rdbuf();
    files.push_back({std::filesystem::path(p).filename().string(), text.str()});
  }
  return files;
}

int serve(const std::string& config_file, int port) {
  auto config = server::load_config(config_file);
  if (port >= 0) config.port = port;
  server::RealFileSystem fs;
  server::Server srv(config, fs, server::make_share_backend(config));
  srv.start();
  std::cout << "serving http://" << config.bind_address << ":" << srv.port() << "/" << std::endl;

  boost::asio::io_context signals_ctx;
  boost::asio::signal_set signals(signals_ctx, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code& ec, int sig) {
    if (!ec) spdlog::info("signal {}: shutting down", sig);
    srv.stop();
  });
  signals_ctx.run();
  srv.wait();
  return 0;
}

int check(const std::vector<std::string>& paths) {
  const auto analysis = lang::analyze(read_files(paths));
  for (const auto& d : analysis.diagnostics) {
    std::cout << d.file << ":" << d.range.line << ":" << d.range.col << ": " << lang::to_string(d.severity) << ": "
              << d.message << "\n";
  }
  return lang::has_errors(analysis.diagnostics) ? 1 : 0;
}

std::string describe(const run::VizCommand& c) {
  switch (c.kind) {
    case run::VizCommand::Kind::grid: return "grid " + std::to_string(c.x) + "x" + std::to_string(c.y);
    case run::VizCommand::Kind::cell: return "cell " + std::to_string(c.x) + " " + std::to_string(c.y) + " " + c.text;
    case run::VizCommand::Kind::label:
      return "label " + std::to_string(c.x) + " " + std::to_string(c.y) + " " + c.text;
  }
  return {};
}

// Runs with the terminal attached. Lines typed as "click X Y" go to onclick,
// everything else answers ask. End of input ends a shell; in a procedure
// with a question pending it kills the run. With `strict`, any stderr output
// makes the exit code 1.
int interactive(run::RunRequest request, bool show_prompts, const std::vector<std::string>& scripted = {},
                bool strict = false) {
  const bool shell = request.mode == run::Mode::shell;
  std::mutex mutex;
  std::condition_variable cv;
  int asks = 0, answers = 0, exit_code = 0, errors = 0;
  bool finished = false, input_closed = false;

  run::Run r(std::move(request), [&](const run::Event& e) {
    switch (e.kind) {
      case run::EventKind::out: std::cout << e.text << std::flush; break;
      case run::EventKind::err:
        std::cerr << e.text << std::flush;
        errors += 1;
        break;
      case run::EventKind::ask:
        if (show_prompts) std::cout << e.text << std::flush;
        break;
      case run::EventKind::viz:
        for (const auto& c : e.viz) std::cerr << "[viz] " << describe(c) << "\n";
        break;
      case run::EventKind::limit: std::cerr << "[limit exceeded: " << e.text << "]\n"; break;
      case run::EventKind::exit: break;
    }
    std::lock_guard lock(mutex);
    if (e.kind == run::EventKind::ask) ++asks;
    if (e.kind == run::EventKind::exit) {
      finished = true;
      exit_code = e.code;
    }
    cv.notify_all();
  });

  auto deliver = [&](const std::string& line) {
    int x = 0, y = 0;
    char extra = 0;
    if (std::sscanf(line.c_str(), "click %d %d %c", &x, &y, &extra) == 2) {
      r.send_click(x, y);
      return;
    }
    {
      std::lock_guard lock(mutex);
      ++answers;
    }
    r.send_input(line);
  };

  if (!scripted.empty()) {
    for (const auto& line : scripted) deliver(line);
    std::lock_guard lock(mutex);
    input_closed = true;
  } else {
    // Detached: a blocked read on stdin must not keep the process alive.
    std::thread([&] {
      std::string line;
      while (std::getline(std::cin, line)) {
        {
          std::lock_guard lock(mutex);
          if (finished) return;
        }
        deliver(line);
      }
      if (shell) deliver("exit(0)");
      std::lock_guard lock(mutex);
      input_closed = true;
      cv.notify_all();
    }).detach();
  }

  std::unique_lock lock(mutex);
  cv.wait(lock, [&] { return finished || (input_closed && asks > answers); });
  if (!finished) {
    lock.unlock();
    r.kill();
    r.wait();
    lock.lock();
  }
  return strict && errors > 0 && exit_code == 0 ? 1 : exit_code;
}

run::ResourceLimits limits_from(std::int64_t wall_ms) {
  auto limits = run::ResourceLimits::local();
  limits.wall_ms = wall_ms;
  return limits;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IDE server and command-line tools for the knowledge-base language"};
  app.require_subcommand(1);

  std::string config_file = "ide.json";
  int port = -1;
  auto* serve_cmd = app.add_subcommand("serve", "Run the web IDE server");
  serve_cmd->add_option("-c,--config", config_file, "Configuration file")->capture_default_str();
  serve_cmd->add_option("-p,--port", port, "Port (overrides the configuration; 0 picks a free port)");

  std::vector<std::string> paths;
  auto* check_cmd = app.add_subcommand("check", "Print parse and resolve diagnostics");
  check_cmd->add_option("files", paths, "Source files")->required()->check(CLI::ExistingFile);

  std::string entry = "main";
  std::int64_t wall_ms = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a procedure with the terminal as its console");
  run_cmd->add_option("files", paths, "Source files")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-e,--entry", entry, "Procedure to run")->capture_default_str();
  run_cmd->add_option("--wall-ms", wall_ms, "Compute time limit in ms (0 = none)")->check(CLI::NonNegativeNumber);

  auto* shell_cmd = app.add_subcommand("shell", "Interactive command shell over the files");
  shell_cmd->add_option("files", paths, "Source files")->required()->check(CLI::ExistingFile);
  shell_cmd->add_option("--wall-ms", wall_ms, "Compute time limit in ms (0 = none)")->check(CLI::NonNegativeNumber);

  std::string kind, theory = "T", structure = "S";
  int max_models = 1;
  auto* infer_cmd = app.add_subcommand("infer", "Run one inference and print the result");
  infer_cmd->add_option("kind", kind, "modelexpand, propagate or unsatcore")
      ->required()
      ->check(CLI::IsMember({"modelexpand", "propagate", "unsatcore"}));
  infer_cmd->add_option("files", paths, "Source files")->required()->check(CLI::ExistingFile);
  infer_cmd->add_option("-t,--theory", theory, "Theory block")->capture_default_str();
  infer_cmd->add_option("-s,--structure", structure, "Structure block")->capture_default_str();
  infer_cmd->add_option("-n,--max-models", max_models, "Models to enumerate (modelexpand)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(config_file, port);
    if (*check_cmd) return check(paths);
    if (*run_cmd) return interactive({run::Mode::main, read_files(paths), entry, limits_from(wall_ms)}, true);
    if (*shell_cmd) return interactive({run::Mode::shell, read_files(paths), "main", limits_from(wall_ms)}, true);
    if (*infer_cmd) {
      // The shell already renders inference results; drive it with one command.
      std::string command = kind + "(" + theory + ", " + structure;
      if (kind == "modelexpand") command += ", " + std::to_string(max_models);
      command += ")";
      auto limits = limits_from(0);
      limits.max_models = std::max<std::size_t>(limits.max_models, static_cast<std::size_t>(max_models));
      return interactive({run::Mode::shell, read_files(paths), "main", limits}, false, {command, "exit(0)"}, true);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
