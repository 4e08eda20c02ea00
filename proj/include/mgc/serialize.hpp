#pragma once

#include <string>

#include "json.hpp"
#include "mgc/analysis.hpp"
#include "mgc/hom.hpp"
#include "mgc/homcrypt.hpp"
#include "mgc/protocol.hpp"
#include "mgc/trapdoor.hpp"

namespace mgc {

/// Canonical text: keys in a fixed insertion order, no whitespace, decimal
/// integers. Equal values dump to equal bytes.
using Json = nlohmann::ordered_json;

std::string dump(const Json& j);
/// Throws ParseError.
Json parse_json(const std::string& text);

Json to_json(const Ring& r);
Ring ring_from_json(const Json& j);

Json to_json(const RingElement& a);
RingElement element_from_json(const Ring& r, const Json& j);

/// {"n": columns, "ring": ..., "rows": [[elem, ...], ...]}
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const std::vector<Matrix>& ms);
std::vector<Matrix> matrices_from_json(const Json& j);

/// Signed integer arrays; the alphabet comes from context.
Json to_json(const FreeWord& w);
FreeWord word_from_json(unsigned alphabet, const Json& j);
Json group_word_to_json(const GroupWord& w);
GroupWord group_word_from_json(const Json& j);

Json to_json(const IdentityWordPair& p);
IdentityWordPair pair_from_json(const Json& j);

Json to_json(const BaseGroupSpec& b);
BaseGroupSpec leaf_from_json(const Json& j);
Json to_json(const OperationLabel& op);
OperationLabel op_from_json(const Json& j);
/// Type checks on load.
Json to_json(const DerivationTree& t);
DerivationTree tree_from_json(const Json& j);

Json to_json(const GroupInstance& g, bool with_provenance = false);
GroupInstance instance_from_json(const Json& j);

/// The derived fields are recomputed with hom_build on load and must match.
Json to_json(const HomSpec& h);
HomSpec hom_from_json(const Json& j);

Json to_json(const Witness& w);
Witness witness_from_json(const Json& j);

Json to_json(const Transcript& t);
Transcript transcript_from_json(const Json& j);

Json to_json(const Presentation& p);
Presentation presentation_from_json(const Json& j);
Json to_json(const HomPublicKey& pk);
HomPublicKey public_key_from_json(const Json& j);
Json to_json(const HomSecretKey& sk);
HomSecretKey secret_key_from_json(const Json& j);

/// SHA-256 of the bytes, 64 lowercase hex characters.
std::string sha256_hex(const std::string& bytes);
/// Fingerprint of the canonical serialization of m.
std::string fingerprint(const Matrix& m);

}  // namespace mgc
