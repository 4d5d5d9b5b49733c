#include "netkin/scenarios.hpp"

namespace netkin {

// 23 nodes, 31 edges: a 3x4 grid core (horizontal edges of length 1,
// vertical 0.5, four sqrt(2) diagonals) with eleven pendant boundary edges.
// Junction degrees reach five; cells follow length (15/30/42).
// The same document is shipped as data/large_network.json.
const std::string& large_network_json() {
    static const std::string doc = R"({
  "nodes": [
    {"id": 0}, {"id": 1}, {"id": 2}, {"id": 3},
    {"id": 4}, {"id": 5}, {"id": 6}, {"id": 7},
    {"id": 8}, {"id": 9}, {"id": 10}, {"id": 11},
    {"id": 12}, {"id": 13}, {"id": 14}, {"id": 15},
    {"id": 16}, {"id": 17}, {"id": 18}, {"id": 19},
    {"id": 20}, {"id": 21}, {"id": 22}
  ],
  "edges": [
    {"id": 0,  "from": 0,  "to": 1,  "length": 1.0, "cells": 30},
    {"id": 1,  "from": 1,  "to": 2,  "length": 1.0, "cells": 30},
    {"id": 2,  "from": 2,  "to": 3,  "length": 1.0, "cells": 30},
    {"id": 3,  "from": 4,  "to": 5,  "length": 1.0, "cells": 30},
    {"id": 4,  "from": 5,  "to": 6,  "length": 1.0, "cells": 30},
    {"id": 5,  "from": 6,  "to": 7,  "length": 1.0, "cells": 30},
    {"id": 6,  "from": 8,  "to": 9,  "length": 1.0, "cells": 30},
    {"id": 7,  "from": 9,  "to": 10, "length": 1.0, "cells": 30},
    {"id": 8,  "from": 10, "to": 11, "length": 1.0, "cells": 30},
    {"id": 9,  "from": 0,  "to": 4,  "length": 0.5, "cells": 15},
    {"id": 10, "from": 2,  "to": 6,  "length": 0.5, "cells": 15},
    {"id": 11, "from": 3,  "to": 7,  "length": 0.5, "cells": 15},
    {"id": 12, "from": 4,  "to": 8,  "length": 0.5, "cells": 15},
    {"id": 13, "from": 5,  "to": 9,  "length": 0.5, "cells": 15},
    {"id": 14, "from": 6,  "to": 10, "length": 0.5, "cells": 15},
    {"id": 15, "from": 7,  "to": 11, "length": 0.5, "cells": 15},
    {"id": 16, "from": 0,  "to": 5,  "length": 1.4142135623730951, "cells": 42},
    {"id": 17, "from": 2,  "to": 7,  "length": 1.4142135623730951, "cells": 42},
    {"id": 18, "from": 4,  "to": 9,  "length": 1.4142135623730951, "cells": 42},
    {"id": 19, "from": 6,  "to": 11, "length": 1.4142135623730951, "cells": 42},
    {"id": 20, "from": 12, "to": 0,  "length": 1.0, "cells": 30},
    {"id": 21, "from": 13, "to": 4,  "length": 1.0, "cells": 30},
    {"id": 22, "from": 14, "to": 8,  "length": 0.5, "cells": 15},
    {"id": 23, "from": 15, "to": 3,  "length": 1.0, "cells": 30},
    {"id": 24, "from": 16, "to": 7,  "length": 1.0, "cells": 30},
    {"id": 25, "from": 17, "to": 11, "length": 0.5, "cells": 15},
    {"id": 26, "from": 18, "to": 8,  "length": 0.5, "cells": 15},
    {"id": 27, "from": 19, "to": 9,  "length": 0.5, "cells": 15},
    {"id": 28, "from": 20, "to": 10, "length": 0.5, "cells": 15},
    {"id": 29, "from": 21, "to": 11, "length": 0.5, "cells": 15},
    {"id": 30, "from": 22, "to": 1,  "length": 1.0, "cells": 30}
  ]
}
)";
    return doc;
}

}  // namespace netkin
