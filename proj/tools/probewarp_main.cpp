#include "probewarp/cli.hpp"

int main(int argc, char** argv) {
  return probewarp::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
