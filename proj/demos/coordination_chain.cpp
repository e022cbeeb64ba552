// Two sensors choosing one of three zones; W rewards agreeing, zone 2 most.
// Prints the resistance graph in DOT form with the stable state's tree,
// then the stable set and its stationary mass for a few exploration rates.

#include <iostream>

#include "ptzgame/chain.hpp"

int main() {
  using namespace ptz;
  const std::size_t n = 3;
  std::vector<double> w((n + 1) * (n + 1), 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) w[x * (n + 1) + y] = x == y ? 0.1 * static_cast<double>(x + 1) : 0.05;

  const auto def = GameDefinition::from_objective(ActionSpace::complete({n, n}), TableObjective({n, n}, w));
  double scale = 1.0;
  ChainModel chain(scale_to_assumption3(tabulate(def), &scale), 0.12);

  const auto sp = stochastic_potentials(chain);
  const auto stable = stochastically_stable_states(chain, sp);
  std::size_t root = 0;
  for (std::size_t l = 0; l < sp.graph.size(); ++l)
    if (sp.potential[l] < sp.potential[root]) root = l;
  write_dot(std::cout, chain, sp.graph, &sp.trees[root]);

  std::cerr << "scale " << scale << ", " << chain.size() << " chain states\nstable:";
  for (auto a : stable) {
    const auto j = chain.game().indexer.decode(a);
    std::cerr << " (" << j[0] << "," << j[1] << ")";
  }
  std::cerr << "\n";
  for (double eps : {0.05, 0.01, 0.002})
    std::cerr << "eps " << eps << ": mass " << diagonal_mass(chain, stationary_distribution(chain, eps).mu, stable)
              << "\n";
}
