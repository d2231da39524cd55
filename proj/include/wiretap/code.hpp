#pragma once
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wiretap/entropy.hpp"

namespace wiretap {

// Explicit network code. Edge tables are row-major over (m, k) for source edges and over
// the alphabets of In(tail) (edge-list order, first edge most significant) otherwise.
// Decoder tables are row-major over the alphabets of In(sink).
struct CodeSpec {
  struct SourceAlphabets {
    int messages = 1;
    int keys = 1;
  };
  struct EdgeMap {
    int alphabet = 1;
    std::vector<int> table;
  };
  struct Decoder {
    std::size_t sink;    // index into net.sinks()
    std::size_t source;  // index into net.sources()
    std::vector<int> table;
  };
  std::vector<SourceAlphabets> sources;  // parallel to net.sources()
  std::vector<EdgeMap> edges;            // parallel to net.edges()
  std::vector<Decoder> decoders;
};

// Parses the JSON code file; table shapes are checked against the network (ValidationError).
CodeSpec parse_code_spec(std::string_view text, const Network& net);
void check_code_spec(const CodeSpec& code, const Network& net);

// Row-major index of the inputs feeding an edge's tail or a sink.
std::size_t domain_size(const CodeSpec& code, const Network& net, const std::vector<std::size_t>& in);

// Evaluates every edge for one symbol of each message and key; edges indexed as net.edges().
class SymbolMap {
 public:
  SymbolMap(const Network& net, const CodeSpec& code);
  void run(const std::vector<int>& m, const std::vector<int>& k, std::vector<int>& w) const;
  int decode(const CodeSpec::Decoder& d, const std::vector<int>& w) const;
  // Index of the In(node) tuple in row-major order.
  std::size_t input_index(const std::vector<std::size_t>& in, const std::vector<int>& w) const;

 private:
  const Network& net_;
  const CodeSpec& code_;
  std::vector<std::size_t> edge_order_;  // edges sorted by tail's topological position
  std::vector<int> src_of_edge_;         // source index or -1
  std::vector<std::vector<std::size_t>> in_of_edge_;
};

struct CodeEvaluation {
  JointPmf joint;  // variables in ground-set order
  struct Error {
    std::string sink, source;
    Rational probability;
  };
  std::vector<Error> errors;
  struct Leak {
    std::vector<std::string> alpha;
    EntropyValue bits;
    bool factorizes;  // p(m_S, w_alpha) = p(m_S) p(w_alpha) exactly
  };
  std::vector<Leak> leakage;
  std::optional<EntropyVector> entropy;  // when N is within the ground-set cap
  std::vector<EntropyValue> rate_variable;  // H(W_e)
  std::vector<long double> rate_fixed;      // log2 |W_e|
};

CodeEvaluation evaluate_code(const Network& net, const CodeSpec& code,
                             std::uint64_t state_cap = std::uint64_t(1) << 24);

// Entropy of the marginal on the variables in mask.
EntropyValue marginal_entropy(const JointPmf& pmf, Subset mask);
// I(A;B) from marginal entropies, with an exact zero when the pmf factorizes.
struct MutualInfo {
  EntropyValue bits;
  bool factorizes;
};
MutualInfo mutual_information(const JointPmf& pmf, Subset a, Subset b);

}  // namespace wiretap
