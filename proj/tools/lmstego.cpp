// lmstego: hide a secret text inside model-generated text and get it back.
//
// Subcommands: prepare, hide, extract, eval. Shared knobs come from a flat
// key=value config file, --set overrides, and direct flags (highest
// precedence last).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lmstego/config.hpp"
#include "lmstego/pipeline.hpp"

namespace {

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  2  usage or configuration error\n"
    "  3  input/corpus error (io-error, empty-corpus, corpus-too-small)\n"
    "  4  payload codec error (bad-magic, unsupported-version, truncated-payload,\n"
    "     malformed-bitstream)\n"
    "  5  capacity-exceeded (secret does not fit the token budget)\n"
    "  6  extraction mismatch (token-not-in-pool, truncated-stegotext)\n"
    "  7  provider error (provider-unavailable, insufficient-top-k,\n"
    "     nondeterminism-detected, vocabulary-mismatch)\n"
    "\n"
    "Remote provider environment: STEGO_LLM_ENDPOINT, STEGO_LLM_TOKEN,\n"
    "STEGO_LLM_TIMEOUT_MS.";

struct CliValues {
  std::string config_file;
  std::vector<std::string> sets;
  std::string corpus;
  std::string provider;
  std::string format = "json";
  uint64_t seed = 0;
  double tau = 0, alpha = 0, beta = 0, t0 = 0, delta0 = 0;
  int k = 0, max_candidates = 0, max_tokens = 0;
};

void add_shared_options(CLI::App* cmd, CliValues& v) {
  cmd->add_option("--config", v.config_file, "key=value config file");
  cmd->add_option("--set", v.sets, "override a config key (key=value), repeatable");
  cmd->add_option("--corpus", v.corpus, "prepared corpus file (one sentence per line)");
  cmd->add_option("--provider", v.provider, "distribution provider: toy | remote");
  cmd->add_option("--seed", v.seed, "pre-shared 64-bit random state");
  cmd->add_option("--tau", v.tau, "candidate pruning threshold");
  cmd->add_option("--alpha", v.alpha, "annealing factor (>= 1)");
  cmd->add_option("--beta", v.beta, "repeat-penalty decay");
  cmd->add_option("--t0", v.t0, "initial temperature");
  cmd->add_option("--delta0", v.delta0, "initial repeat penalty");
  cmd->add_option("--k", v.k, "context size (sentences in the prompt)");
  cmd->add_option("--max-candidates", v.max_candidates, "candidate pool cap");
  cmd->add_option("--max-tokens", v.max_tokens, "generation length cap per envelope");
  cmd->add_option("--format", v.format, "report format: json | tsv");
}

lmstego::RunConfig resolve_config(const CLI::App* cmd, const CliValues& v) {
  lmstego::RunConfig cfg;
  if (!v.config_file.empty()) cfg = lmstego::RunConfig::load(v.config_file);
  for (const auto& kv : v.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw lmstego::Error(lmstego::Errc::invalid_config, "--set expects key=value: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (cmd->count("--corpus")) cfg.corpus_path = v.corpus;
  if (cmd->count("--provider")) cfg.set("provider", v.provider);
  if (cmd->count("--seed")) cfg.embed.seed = v.seed;
  if (cmd->count("--tau")) cfg.embed.tau = v.tau;
  if (cmd->count("--alpha")) cfg.embed.alpha = v.alpha;
  if (cmd->count("--beta")) cfg.embed.beta = v.beta;
  if (cmd->count("--t0")) cfg.embed.t0 = v.t0;
  if (cmd->count("--delta0")) cfg.embed.delta0 = v.delta0;
  if (cmd->count("--k")) cfg.embed.context_size = v.k;
  if (cmd->count("--max-candidates")) cfg.embed.max_candidates = v.max_candidates;
  if (cmd->count("--max-tokens")) cfg.embed.max_tokens = v.max_tokens;
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw lmstego::Error(lmstego::Errc::io_error, "cannot open file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw lmstego::Error(lmstego::Errc::io_error, "cannot write file: " + path);
  os << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lmstego: generative linguistic steganography toolkit"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);

  CliValues v;

  // prepare
  auto* prepare = app.add_subcommand(
      "prepare", "split a raw text into sentences and derive the byte-frequency table");
  std::string prepare_in, prepare_out;
  prepare->add_option("--in", prepare_in, "raw UTF-8 input file")->required();
  prepare->add_option("--corpus", prepare_out, "prepared corpus output path")->required();

  // hide
  auto* hide = app.add_subcommand("hide", "embed a secret text into generated stegotext");
  std::string secret_text, secret_file, hide_out;
  hide->add_option("--secret", secret_text, "secret text (UTF-8)");
  hide->add_option("--secret-file", secret_file, "read the secret from a file");
  hide->add_option("--out", hide_out, "envelope output path")->required();
  add_shared_options(hide, v);

  // extract
  auto* extract = app.add_subcommand("extract", "recover the secret from envelope file(s)");
  std::vector<std::string> extract_files;
  std::string extract_out;
  extract->add_option("envelopes", extract_files, "envelope files in chain order")->required();
  extract->add_option("--out", extract_out, "write the secret here instead of stdout");
  add_shared_options(extract, v);

  // eval
  auto* eval = app.add_subcommand("eval", "compute BPW and optional PPL/JSD over envelopes");
  std::vector<std::string> eval_files;
  bool eval_ppl = false;
  std::string eval_jsd_corpus;
  eval->add_option("envelopes", eval_files, "envelope files")->required();
  eval->add_flag("--ppl", eval_ppl, "also report provider perplexity of the stegotext");
  eval->add_option("--jsd-corpus", eval_jsd_corpus,
                   "second prepared corpus; reports mean per-step JSD against it");
  add_shared_options(eval, v);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (prepare->parsed()) {
      lmstego::PreparedCorpus p = lmstego::prepare_corpus(prepare_in, prepare_out);
      std::cout << "corpus " << p.corpus_path << "\n"
                << "freq_table " << p.freq_path << "\n"
                << "sentences " << p.sentence_count << "\n"
                << "digest " << p.digest << "\n";
      return 0;
    }
    if (hide->parsed()) {
      lmstego::RunConfig cfg = resolve_config(hide, v);
      if (cfg.corpus_path.empty())
        throw lmstego::Error(lmstego::Errc::invalid_config, "hide requires --corpus");
      if (!secret_file.empty() && !secret_text.empty())
        throw lmstego::Error(lmstego::Errc::invalid_config,
                             "use either --secret or --secret-file, not both");
      std::string secret = !secret_file.empty() ? read_file(secret_file) : secret_text;
      lmstego::HideResult result = lmstego::cmd_hide(secret, cfg, hide_out);
      for (const auto& f : result.files) std::cout << f << "\n";
      return 0;
    }
    if (extract->parsed()) {
      lmstego::RunConfig cfg = resolve_config(extract, v);
      if (cfg.corpus_path.empty())
        throw lmstego::Error(lmstego::Errc::invalid_config, "extract requires --corpus");
      std::string secret = lmstego::cmd_extract(extract_files, cfg);
      if (extract_out.empty())
        std::cout << secret;
      else
        write_file(extract_out, secret);
      return 0;
    }
    if (eval->parsed()) {
      lmstego::RunConfig cfg = resolve_config(eval, v);
      if (cfg.corpus_path.empty())
        throw lmstego::Error(lmstego::Errc::invalid_config, "eval requires --corpus");
      if (v.format != "json" && v.format != "tsv")
        throw lmstego::Error(lmstego::Errc::invalid_config, "--format must be json or tsv");
      lmstego::EvalReport report = lmstego::cmd_eval(eval_files, cfg, eval_ppl, eval_jsd_corpus);
      std::cout << (v.format == "json" ? lmstego::eval_to_json(report)
                                       : lmstego::eval_to_tsv(report));
      return 0;
    }
  } catch (const lmstego::Error& e) {
    std::cerr << "lmstego: error: " << lmstego::errc_name(e.code()) << ": " << e.what()
              << "\n";
    return lmstego::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "lmstego: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
