#pragma once

namespace bergman {

/// Selects the OpenMP path or the serial reference path of a parallel kernel.
/// Both produce identical results; reductions are done in a fixed order.
enum class Exec { Serial, Parallel };

}  // namespace bergman
