from pathlib import Path
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from apps.circuit.domain import OracleBudget
from apps.circuit.validation import validate_circuit
from apps.common.conf import get_setting
from apps.common.exceptions import InputFileError, SwitchLabError, diagnostic
from apps.scenarios.parsers import parse_circuit
from apps.scenarios.reports import render_diagnostic

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Lit un circuit au format texte et affiche son rapport de validation (règles 1 à 4)'

    def add_arguments(self, parser):
        parser.add_argument(
            'circuit_file',
            nargs='?',
            default=str(Path(get_setting('SCENARIO_DIR')) / 'two_call.circuit'),
            type=str,
            help='Le chemin vers le fichier de circuit',
        )
        parser.add_argument(
            '--budget',
            action='append',
            default=[],
            metavar='ID=COUNT',
            help="Budget d'appels d'un oracle (remplace le budget déclaré dans le fichier)",
        )

    def parse_budget(self, entries):
        counts = {}
        for entry in entries:
            oracle_id, _, count = entry.partition('=')
            if not oracle_id or not count.isdigit():
                raise ValidationError(
                    "--budget %(name)s : ID=COUNT attendu",
                    code='syntax', params={'name': entry, 'field': 'budget'},
                )
            counts[oracle_id] = int(count)
        return OracleBudget(counts) if counts else None

    def handle(self, *args, **options):
        file_path = options['circuit_file']
        try:
            budget = self.parse_budget(options['budget'])
            circuit = parse_circuit(Path(file_path).read_text(encoding='utf-8'))
        except OSError as e:
            details = diagnostic(InputFileError(f"Le fichier '{file_path}' est illisible : {e.strerror}", file_path))
        except (ValidationError, SwitchLabError) as e:
            details = diagnostic(e)
        else:
            details = None
        if details is not None:
            logger.error(f"Circuit illisible : {details['message']}")
            self.stderr.write(self.style.ERROR(render_diagnostic(details)), ending='')
            raise CommandError(f"{details['kind']}: {details['message']}")

        report = validate_circuit(circuit, budget)
        self.stdout.write(f"Circuit {file_path} : {circuit.qubit_count} fil(s), {len(circuit.nodes)} nœud(s)")
        for oracle_id, calls in sorted(circuit.oracle_calls().items()):
            self.stdout.write(f"  oracle {oracle_id} : {calls} appel(s)")
        if report.passed:
            self.stdout.write(self.style.SUCCESS("Circuit valide (règles 1 à 4 respectées)"))
            return
        for violation in report.violations:
            where = f" (nœud {violation.node_index})" if violation.node_index is not None else ''
            self.stdout.write(self.style.WARNING(f"{violation.kind}{where} : {violation.message}"))
        raise CommandError(f"Circuit invalide : {', '.join(report.kinds())}")
