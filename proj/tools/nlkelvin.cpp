#include "nlkelvin/cli_io.hpp"

int main(int argc, char** argv) { return nlkelvin::dispatch(argc, argv); }
