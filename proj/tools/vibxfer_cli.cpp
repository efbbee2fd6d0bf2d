#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vibxfer/runner.hpp"

int main (int argc, char** argv)
{
  CLI::App app {"Transfer the vibrato (FM and AM) of a sidechain recording onto an input"};

  vibxfer::RunConfig cfg;
  std::string        controls;
  app.add_option ("--input", cfg.input_path, "Input WAV to be modulated")->required();
  app.add_option ("--sidechain", cfg.sidechain_path, "Sidechain WAV whose vibrato is analyzed")->required();
  app.add_option ("--output", cfg.output_path, "Output WAV (32-bit float)")->required();
  app.add_option ("--alpha-f", cfg.alpha_f, "FM depth scalar")->capture_default_str();
  app.add_option ("--alpha-a", cfg.alpha_a, "AM depth scalar")->capture_default_str();
  app.add_option ("--block-size", cfg.block_size, "Streaming block size (power of two, 16..2048)")
    ->capture_default_str();
  app.add_option ("--dump-controls", controls, "Write per-sample control signals to this CSV");

  CLI11_PARSE (app, argc, argv);
  if (!controls.empty()) {
    cfg.controls_csv_path = controls;
  }
  return vibxfer::run (cfg, std::cerr);
}
