// Regenerates the Bristol Fashion circuit resources.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "qres/circuit.hpp"
#include "qres/circuit_gen.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the Bristol Fashion circuits used by the QeSe protocol"};
  std::string out_dir = "resources";
  app.add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::string& name, const qres::circuit::Circuit& c) {
    auto path = std::filesystem::path(out_dir) / name;
    std::ofstream(path) << qres::circuit::to_bristol(c);
    std::cout << path.string() << ": " << c.gates().size() << " gates ("
              << c.count(qres::circuit::GateKind::And) << " AND, "
              << c.count(qres::circuit::GateKind::Xor) << " XOR, "
              << c.count(qres::circuit::GateKind::Inv) << " INV), " << c.num_wires() << " wires\n";
  };
  write("aes_128.txt", qres::circuit::make_aes128_circuit());
  write("sha256_compress.txt", qres::circuit::make_sha256_compress_circuit());
  return 0;
}
