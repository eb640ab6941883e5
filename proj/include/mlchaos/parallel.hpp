#pragma once

namespace mlchaos {

/// Selects the serial reference loop or the OpenMP kernel of a data-parallel operation.
/// Both produce identical results in index order.
enum class Execution { Serial, Parallel };

}  // namespace mlchaos
