#pragma once

// Umbrella header. crypto_ed25519.hpp is intentionally not included here; pull
// it in explicitly where real signatures (and libcrypto) are wanted.

#include "superdist/common.hpp"
#include "superdist/config.hpp"
#include "superdist/crypto.hpp"
#include "superdist/licences.hpp"
#include "superdist/market.hpp"
#include "superdist/overlay.hpp"
#include "superdist/protocol.hpp"
#include "superdist/rng.hpp"
#include "superdist/sha256.hpp"
#include "superdist/sim.hpp"
